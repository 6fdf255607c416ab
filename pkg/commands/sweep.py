"""
sweep — D_m, V_c and coincidence probabilities over a probe-angle grid.
"""
import logging

import click

from commands.options import grid_options, pass_run, source_options
from modules.experiment_sim import SweepEngine, SweepMode
from modules.report_writer import emit, sweep_to_csv, sweep_to_json

logger = logging.getLogger(__name__)


@click.command('sweep')
@source_options
@grid_options
@click.option('--mode', type=click.Choice([m.value for m in SweepMode]), default=None)
@click.option('--shots', type=int, default=None, help='Coincidences per basis and grid point (monte_carlo).')
@click.option('--workers', type=int, default=None, help='Threads for monte_carlo sweeps.')
@click.option('--circular', 'circular_basis', is_flag=True, default=None,
              help='Also count in the circular object basis.')
@pass_run
def sweep_cmd(run, intensity, circular_basis, **flags):
    """Emit one row per grid point (CSV by default)."""
    spec = run.resolve(intensity=intensity or None, circular_basis=circular_basis or None, **flags)
    state, _, channel = spec.build_state()
    series = SweepEngine(state, spec.sim_config(), channel).run(SweepMode(spec.mode))
    if run.output_format('csv') == 'json':
        emit(sweep_to_json(series), run.output)
    else:
        emit(sweep_to_csv(series), run.output)
