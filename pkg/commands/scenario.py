"""
scenario — scalar complementarity report for one source.
"""
import logging

import click

from commands.options import pass_run, source_options
from modules.report_writer import (
    PUBLISHED_CASES,
    emit,
    mapping_to_csv,
    published_comparison,
    scenario_report,
    to_json,
)

logger = logging.getLogger(__name__)


@click.command('scenario')
@source_options
@click.option('--compare-paper', '--compare-published', 'compare_case',
              type=click.Choice(sorted(PUBLISHED_CASES)), default=None,
              help='Report a published case next to the published values.')
@pass_run
def scenario_cmd(run, compare_case, intensity, **source):
    """Print P, V, V0, D, c, w+, theta_0 and the post-selection probability."""
    if compare_case:
        emit(to_json(published_comparison(compare_case)), run.output)
        return

    spec = run.resolve(intensity=intensity or None, **source)
    payload = scenario_report(spec)
    if run.output_format('json') == 'csv':
        emit(mapping_to_csv(payload), run.output)
    else:
        emit(to_json(payload), run.output)
