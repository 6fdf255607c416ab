"""
Scenario Specification — the validated description of one experimental run.

A scenario names a source (singlet, canonical or polarizer), the overlap
factor, a probe-angle grid in degrees and the evaluation mode. It is built by
layering Config defaults, a flat JSON document and command-line flags.
"""
import dataclasses
import json
import logging
import math
from dataclasses import dataclass
from typing import Optional

from modules.errors import DomainError, ScenarioError
from modules.experiment_sim import SimConfig, SweepMode, degree_grid
from modules.state_preparation import (
    PER_PLATE_FACTOR,
    PlateStack,
    PolarizerChannel,
    make_canonical,
    make_singlet,
    prepare_after_polarizer,
)

logger = logging.getLogger(__name__)

SOURCES = ('singlet', 'canonical', 'polarizer')
FINITE_FIELDS = (
    'w_plus', 'phi_deg', 'c', 'alpha_deg', 't', 'per_plate_factor',
    'eta_overlap', 'theta_start_deg', 'theta_stop_deg', 'theta_step_deg',
)


@dataclass(frozen=True)
class ScenarioSpec:
    source: str = 'singlet'
    # canonical source
    w_plus: Optional[float] = None
    phi_deg: float = 0.0
    c: Optional[float] = None
    # polarizer source
    alpha_deg: Optional[float] = None
    t: Optional[float] = None
    intensity: bool = False
    n_plates: Optional[int] = None
    per_plate_factor: float = PER_PLATE_FACTOR
    # channel and grid
    eta_overlap: float = 1.0
    theta_start_deg: float = 0.0
    theta_stop_deg: float = 90.0
    theta_step_deg: float = 1.0
    # evaluation
    mode: str = SweepMode.ANALYTIC.value
    shots: int = 100_000
    seed: int = 0
    circular_basis: bool = False
    workers: int = 1

    def __post_init__(self):
        for name in FINITE_FIELDS:
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ScenarioError(name, f'must be finite, got {value}')
        self._validate_source()
        if not (0.0 <= self.eta_overlap <= 1.0):
            raise ScenarioError('eta_overlap', f'must lie in [0, 1], got {self.eta_overlap}')
        if not self.theta_step_deg > 0:
            raise ScenarioError('theta_step_deg', f'must be positive, got {self.theta_step_deg}')
        if self.theta_stop_deg < self.theta_start_deg:
            raise ScenarioError('theta_stop_deg', f'{self.theta_stop_deg} lies below theta_start_deg {self.theta_start_deg}')
        if self.mode not in {m.value for m in SweepMode}:
            raise ScenarioError('mode', f"expected 'analytic' or 'monte_carlo', got {self.mode!r}")
        if self.shots < 1:
            raise ScenarioError('shots', f'must be >= 1, got {self.shots}')
        if not (0 <= self.seed < 2 ** 64):
            raise ScenarioError('seed', f'must be a 64-bit unsigned integer, got {self.seed}')
        if self.workers < 1:
            raise ScenarioError('workers', f'must be >= 1, got {self.workers}')

    def _validate_source(self):
        if self.source not in SOURCES:
            raise ScenarioError('source', f"expected one of {', '.join(SOURCES)}, got {self.source!r}")
        if self.source == 'canonical':
            for name in ('w_plus', 'c'):
                value = getattr(self, name)
                if value is None:
                    raise ScenarioError(name, 'required for a canonical source')
                if not (0.0 <= value <= 1.0):
                    raise ScenarioError(name, f'must lie in [0, 1], got {value}')
        elif self.source == 'polarizer':
            if self.alpha_deg is None:
                raise ScenarioError('alpha_deg', 'required for a polarizer source')
            if (self.t is None) == (self.n_plates is None):
                raise ScenarioError('t', 'give exactly one of t / n_plates for a polarizer source')
            if self.t is not None and not (0.0 <= self.t <= 1.0):
                raise ScenarioError('t', f'must lie in [0, 1], got {self.t}')
            if self.n_plates is not None and self.n_plates < 0:
                raise ScenarioError('n_plates', f'must be >= 0, got {self.n_plates}')
            if not (0.0 < self.per_plate_factor <= 1.0):
                raise ScenarioError('per_plate_factor', f'must lie in (0, 1], got {self.per_plate_factor}')

    # ─── BUILDERS ─────────────────────────────────────────────

    def channel(self):
        if self.source != 'polarizer':
            return None
        if self.n_plates is not None:
            t = PlateStack(self.n_plates, self.per_plate_factor).transmittivity
            return PolarizerChannel(math.radians(self.alpha_deg), t)
        return PolarizerChannel.from_degrees(self.alpha_deg, self.t, intensity=self.intensity)

    def build_state(self):
        """Returns (PureState, success probability, PolarizerChannel or None)."""
        try:
            if self.source == 'singlet':
                return make_singlet(), 1.0, None
            if self.source == 'canonical':
                return make_canonical(self.w_plus, math.radians(self.phi_deg), self.c), 1.0, None
            channel = self.channel()
            state, success = prepare_after_polarizer(channel)
            return state, success, channel
        except DomainError as e:
            raise ScenarioError(self.source, str(e)) from e

    def theta_grid_deg(self):
        return degree_grid(self.theta_start_deg, self.theta_stop_deg, self.theta_step_deg)

    def sim_config(self):
        return SimConfig(
            shots_per_point=self.shots,
            seed=self.seed,
            eta_overlap=self.eta_overlap,
            theta_grid=tuple(math.radians(d) for d in self.theta_grid_deg()),
            circular_basis=self.circular_basis,
            workers=self.workers,
        )

    def as_dict(self):
        return dataclasses.asdict(self)


# ─── PARSING ──────────────────────────────────────────────────

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioSpec)}


def _coerce(name, value):
    kind = _FIELD_TYPES[name]
    if value is None:
        return None
    try:
        if kind is bool:
            if isinstance(value, str):
                return value.strip().lower() in ('1', 'true', 'yes', 'on')
            return bool(value)
        if kind is str:
            return str(value)
        if kind in (int, Optional[int]):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(f'{value} is not an integer')
            return int(value)
        return float(value)
    except (TypeError, ValueError) as e:
        raise ScenarioError(name, f'cannot use {value!r}: {e}') from e


def build_spec(*layers):
    """Merge mappings left to right (later layers win, None values skipped) into a ScenarioSpec."""
    merged = {}
    for layer in layers:
        for key, value in (layer or {}).items():
            if key not in _FIELD_TYPES:
                raise ScenarioError(key, 'unknown scenario field')
            if value is not None:
                merged[key] = _coerce(key, value)
    spec = ScenarioSpec(**merged)
    logger.debug(f"Scenario resolved: {spec}")
    return spec


def load_scenario_file(path):
    """Read a flat JSON scenario document."""
    try:
        with open(path, encoding='utf-8') as fh:
            data = json.load(fh)
    except OSError as e:
        raise ScenarioError('config', f'cannot read {path}: {e.strerror or e}') from e
    except json.JSONDecodeError as e:
        raise ScenarioError('config', f'{path} is not valid JSON: {e}') from e
    if not isinstance(data, dict):
        raise ScenarioError('config', f'{path} must hold a JSON object')
    return data
