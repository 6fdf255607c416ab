"""
Shared click options and scenario resolution for the subcommands.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import click

from config import Config
from modules.scenario import SOURCES, build_spec

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    """Global flags collected by the top-level group."""

    seed: Optional[int] = None
    eta: Optional[float] = None
    output: Optional[str] = None
    fmt: Optional[str] = None
    file_values: dict = field(default_factory=dict)

    def resolve(self, **flags):
        """Config defaults < JSON config file < command flags < global flags."""
        global_flags = {'seed': self.seed, 'eta_overlap': self.eta}
        return build_spec(Config.scenario_defaults(), self.file_values, flags, global_flags)

    def output_format(self, default):
        return self.fmt or default


def source_options(f):
    """--source and the parameters of each source kind."""
    options = [
        click.option('--source', type=click.Choice(SOURCES), default=None, help='Pair source (default singlet).'),
        click.option('--w-plus', 'w_plus', type=float, default=None, help='Canonical source: weight of path O+.'),
        click.option('--phi', 'phi_deg', type=float, default=None, help='Canonical source: relative phase (deg).'),
        click.option('--c', 'c', type=float, default=None, help='Canonical source: probe overlap c.'),
        click.option('--alpha', 'alpha_deg', type=float, default=None, help='Polarizer axis (deg).'),
        click.option('--t', 't', type=float, default=None, help='Polarizer amplitude transmittivity.'),
        click.option('--intensity', is_flag=True, default=None, help='Read --t as an intensity transmittivity.'),
        click.option('--n-plates', 'n_plates', type=int, default=None, help='Polarizer built from N Brewster plates.'),
        click.option('--per-plate-factor', type=float, default=None, help='Amplitude factor of one plate.'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def grid_options(f):
    options = [
        click.option('--start', 'theta_start_deg', type=float, default=None, help='First probe angle (deg).'),
        click.option('--stop', 'theta_stop_deg', type=float, default=None, help='Last probe angle (deg).'),
        click.option('--step', 'theta_step_deg', type=float, default=None, help='Probe angle step (deg).'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


# Hands the RunContext built by the top-level group to a subcommand.
pass_run = click.make_pass_decorator(RunContext, ensure=True)
