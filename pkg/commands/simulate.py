"""
simulate — coincidence counts and count-based estimates at one probe angle.
"""
import csv
import io
import logging
import math

import click

from commands.options import pass_run, source_options
from modules.complementarity import conditioned_visibility, measured_distinguishability, quantity_report
from modules.experiment_sim import SweepEngine, estimate_from_counts
from modules.report_writer import emit, sig, to_json

logger = logging.getLogger(__name__)


@click.command('simulate')
@source_options
@click.option('--theta', 'theta_deg', type=float, default=0.0, show_default=True, help='Probe angle (deg).')
@click.option('--shots', type=int, default=None, help='Coincidences per analyzer basis.')
@click.option('--circular', 'circular_basis', is_flag=True, default=None,
              help='Also count in the circular object basis.')
@pass_run
def simulate_cmd(run, theta_deg, intensity, circular_basis, **flags):
    """Draw Z/X (and Y) counts and re-estimate P, D_m, V and V_c from them."""
    spec = run.resolve(intensity=intensity or None, circular_basis=circular_basis or None, **flags)
    state, _, channel = spec.build_state()
    engine = SweepEngine(state, spec.sim_config(), channel)
    target = engine.target
    theta = math.radians(theta_deg)

    records = engine.count(theta, 0)
    estimate = estimate_from_counts(*records)

    if run.output_format('json') == 'csv':
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator='\n')
        writer.writerow(['theta_deg', 'basis', 'n_pp', 'n_pm', 'n_mp', 'n_mm', 'n_total'])
        for record in records:
            writer.writerow(list(record.as_dict().values()))
        emit(buf.getvalue(), run.output)
        return

    report = quantity_report(target)
    payload = {
        'theta_deg': sig(theta_deg),
        'seed': spec.seed,
        'records': [record.as_dict() for record in records],
        'estimates': {
            'P': sig(estimate.p_pred),
            'D_m': sig(estimate.d_m),
            'V': sig(estimate.vis),
            'V_c': sig(estimate.v_c),
        },
        'stderr': {k: sig(v) for k, v in estimate.stderr.items()},
        'unreliable': list(estimate.unreliable),
        'analytic': {
            'P': sig(report.p_pred),
            'D_m': sig(measured_distinguishability(target, theta)),
            'V': sig(report.vis),
            'V_c': sig(conditioned_visibility(target, theta)),
        },
    }
    emit(to_json(payload), run.output)
