"""
verify — run the complementarity property suite on random states.
"""
import logging

import click

from commands.options import pass_run
from config import Config
from modules.property_suite import PropertySuite, format_results
from modules.report_writer import emit, to_json

logger = logging.getLogger(__name__)


@click.command('verify')
@click.option('--trials', type=int, default=Config.VERIFY_TRIALS, show_default=True)
@click.option('--force-singlet', is_flag=True, help='Use the singlet as the first state.')
@pass_run
@click.pass_context
def verify_cmd(ctx, run, trials, force_singlet):
    """Exit 0 when every check passes, 1 otherwise."""
    if trials < 1:
        raise click.BadParameter(f'must be >= 1, got {trials}', param_hint='--trials')
    seed = run.seed if run.seed is not None else int(run.file_values.get('seed', Config.SEED))
    results = PropertySuite(trials=trials, seed=seed, force_singlet=force_singlet).run()

    if run.output_format('text') == 'json':
        emit(to_json({'trials': trials, 'seed': seed, 'checks': [r.as_dict() for r in results]}), run.output)
    else:
        emit(format_results(results), run.output)

    if not all(r.passed for r in results):
        ctx.exit(1)
