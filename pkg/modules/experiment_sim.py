"""
Experiment Simulation — shot-noise coincidence counting and probe-angle sweeps.

Monte Carlo streams are numpy PCG64 generators seeded from
SeedSequence([seed, grid_index, basis_index]), so every grid point can be
evaluated independently and in any order without changing the output.
"""
import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from modules.complementarity import (
    PATH_FORM,
    PROBE_FORMS,
    Basis,
    CoincidenceSet,
    coincidence_probs,
    conditioned_visibility,
    estimate_from_probs,
    has_quadrature_coherence,
    measured_distinguishability,
    quantity_report,
)
from modules.errors import DomainError, InsufficientCountsError
from modules.state_algebra import DensityOperator, PureState, to_density

logger = logging.getLogger(__name__)

MIN_COUNTS = 100
KINK_SIGMAS = 3.0
DEFAULT_ETA = 0.94

CSV_COLUMNS = (
    'theta_deg',
    'p_pp_z', 'p_pm_z', 'p_mp_z', 'p_mm_z',
    'p_pp_x', 'p_pm_x', 'p_mp_x', 'p_mm_x',
    'd_m', 'v_c', 'd_m_sq', 'v_c_sq', 'sum_sq',
)


class SweepMode(str, enum.Enum):
    ANALYTIC = 'analytic'
    MONTE_CARLO = 'monte_carlo'


def degree_grid(start, stop, step):
    """Inclusive grid start, start+step, ... <= stop (degrees)."""
    if not all(math.isfinite(v) for v in (start, stop, step)):
        raise DomainError(f'grid bounds must be finite, got start={start} stop={stop} step={step}')
    if not step > 0:
        raise DomainError(f'grid step must be positive, got {step}')
    if stop < start:
        raise DomainError(f'grid stop {stop} lies below start {start}')
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def _default_grid():
    return tuple(math.radians(d) for d in degree_grid(0.0, 90.0, 1.0))


# ─── CONFIG AND RECORDS ───────────────────────────────────────

@dataclass(frozen=True)
class SimConfig:
    shots_per_point: int = 100_000
    seed: int = 0
    eta_overlap: float = DEFAULT_ETA
    theta_grid: tuple = field(default_factory=_default_grid)
    circular_basis: bool = False
    workers: int = 1

    def __post_init__(self):
        grid = tuple(float(th) for th in self.theta_grid)
        if not grid:
            raise DomainError('theta grid is empty')
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError('theta grid must be strictly increasing')
        if int(self.shots_per_point) < 1:
            raise DomainError(f'shots_per_point must be >= 1, got {self.shots_per_point}')
        if not (0 <= int(self.seed) < 2 ** 64):
            raise DomainError(f'seed must be a 64-bit unsigned integer, got {self.seed}')
        if not (0.0 <= self.eta_overlap <= 1.0):
            raise DomainError(f'eta_overlap must lie in [0, 1], got {self.eta_overlap}')
        if int(self.workers) < 1:
            raise DomainError(f'workers must be >= 1, got {self.workers}')
        object.__setattr__(self, 'theta_grid', grid)

    @classmethod
    def from_degrees(cls, start, stop, step, **kwargs):
        grid = tuple(math.radians(d) for d in degree_grid(start, stop, step))
        return cls(theta_grid=grid, **kwargs)


@dataclass(frozen=True)
class CountRecord:
    theta: float
    basis: Basis
    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int
    n_total: int

    def __post_init__(self):
        object.__setattr__(self, 'basis', Basis(self.basis))
        counts = (self.n_pp, self.n_pm, self.n_mp, self.n_mm)
        if any(n < 0 for n in counts):
            raise DomainError(f'negative count in {counts}')
        if self.n_total < 1 or sum(counts) != self.n_total:
            raise DomainError(f'counts {counts} do not add up to n_total={self.n_total}')

    def counts(self):
        return np.array([self.n_pp, self.n_pm, self.n_mp, self.n_mm])

    def frequencies(self):
        f = self.counts() / self.n_total
        return CoincidenceSet(self.basis, self.theta, *map(float, f))

    def as_dict(self):
        return {
            'theta_deg': math.degrees(self.theta),
            'basis': self.basis.value,
            'n_pp': self.n_pp,
            'n_pm': self.n_pm,
            'n_mp': self.n_mp,
            'n_mm': self.n_mm,
            'n_total': self.n_total,
        }


@dataclass(frozen=True)
class EstimateSet:
    """Count-based estimates with first-order standard errors.

    A standard error is None when its absolute-value argument lies within
    KINK_SIGMAS of zero; such quantities are listed in `unreliable`.
    """

    theta: float
    p_pred: float
    d_m: float
    vis: float
    v_c: float
    stderr: dict
    unreliable: tuple = ()

    def as_dict(self):
        return {
            'theta_deg': math.degrees(self.theta),
            'P': self.p_pred,
            'D_m': self.d_m,
            'V': self.vis,
            'V_c': self.v_c,
            'stderr': dict(self.stderr),
            'unreliable': list(self.unreliable),
        }


@dataclass(frozen=True)
class SweepHeader:
    p_pred: float
    vis: float
    dist: float
    c_overlap: Optional[float]
    w_plus: float
    t: Optional[float]
    alpha_deg: Optional[float]
    eta: float
    mode: str


@dataclass(frozen=True)
class SweepPoint:
    theta: float
    probs_z: tuple
    probs_x: tuple
    d_m: float
    v_c: float
    stderr: Optional[dict] = None

    @property
    def d_m_sq(self):
        return self.d_m * self.d_m

    @property
    def v_c_sq(self):
        return self.v_c * self.v_c

    @property
    def sum_sq(self):
        return self.d_m_sq + self.v_c_sq

    def row(self):
        return [math.degrees(self.theta), *self.probs_z, *self.probs_x,
                self.d_m, self.v_c, self.d_m_sq, self.v_c_sq, self.sum_sq]


@dataclass(frozen=True)
class SweepSeries:
    header: SweepHeader
    points: tuple

    def rows(self):
        return [point.row() for point in self.points]

    def column(self, name):
        idx = CSV_COLUMNS.index(name)
        return np.array([row[idx] for row in self.rows()])

    def to_dict(self):
        return {
            'header': {
                'P': self.header.p_pred,
                'V': self.header.vis,
                'D': self.header.dist,
                'c': self.header.c_overlap,
                'w_plus': self.header.w_plus,
                't': self.header.t,
                'alpha_deg': self.header.alpha_deg,
                'eta': self.header.eta,
                'mode': self.header.mode,
            },
            'columns': list(CSV_COLUMNS),
            'rows': self.rows(),
        }


# ─── CHANNEL ──────────────────────────────────────────────────

def apply_overlap_dephasing(rho, eta):
    """Scale the object coherences (off-diagonal object blocks) by eta."""
    if not (0.0 <= eta <= 1.0):
        raise DomainError(f'eta must lie in [0, 1], got {eta}')
    if isinstance(rho, PureState):
        rho = to_density(rho)
    m = np.array(rho.m)
    m[0:2, 2:4] *= eta
    m[2:4, 0:2] *= eta
    return DensityOperator(m)


# ─── SAMPLING ─────────────────────────────────────────────────

def point_rng(seed, grid_index, basis):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, grid_index, Basis(basis).seed_index])))


def _sequential_binomial(probs, shots, rng):
    remaining = shots
    mass = 1.0
    counts = []
    for p in probs[:-1]:
        if remaining == 0 or mass <= 0.0:
            n = 0
        else:
            n = int(rng.binomial(remaining, min(1.0, max(0.0, p / mass))))
        counts.append(n)
        remaining -= n
        mass -= p
    counts.append(remaining)
    return counts


def simulate_counts(state, theta, basis, shots, rng):
    """Multinomial coincidence counts drawn as pp, pm, mp, mm conditional binomials."""
    if int(shots) < 1:
        raise DomainError(f'shots must be >= 1, got {shots}')
    rng = np.random.default_rng(rng)
    probs = coincidence_probs(state, theta, basis).as_array()
    counts = _sequential_binomial(probs, int(shots), rng)
    return CountRecord(float(theta), Basis(basis), *counts, int(shots))


# ─── ESTIMATION ───────────────────────────────────────────────

def _form_variance(g, p, n):
    mean = g @ p
    return max(0.0, float((g * g) @ p - mean * mean)) / n


def _near_kink(value, variance):
    return abs(value) <= KINK_SIGMAS * math.sqrt(variance)


def _abs_sum_stderr(forms, p, n):
    """Standard error of sum_k |g_k . p| for one record, or None near a kink."""
    values = [float(g @ p) for g in forms]
    if any(_near_kink(v, _form_variance(g, p, n)) for g, v in zip(forms, values)):
        return None
    grad = sum(math.copysign(1.0, v) * g for g, v in zip(forms, values))
    return math.sqrt(_form_variance(grad, p, n))


def _quadrature_stderr(forms, px, nx, py, ny):
    """Standard error of sum_k hypot(g_k . px, g_k . py), or None near the origin."""
    grad_x = np.zeros(4)
    grad_y = np.zeros(4)
    for g in forms:
        lx, ly = float(g @ px), float(g @ py)
        radius = math.hypot(lx, ly)
        spread = math.sqrt(_form_variance(g, px, nx) + _form_variance(g, py, ny))
        if radius <= KINK_SIGMAS * spread:
            return None
        grad_x = grad_x + (lx / radius) * g
        grad_y = grad_y + (ly / radius) * g
    return math.sqrt(_form_variance(grad_x, px, nx) + _form_variance(grad_y, py, ny))


def estimate_from_counts(z, x, y=None):
    """Estimates of (P, D_m, V, V_c) with standard errors from Z/X (and optional Y) counts."""
    records = (z, x) if y is None else (z, x, y)
    for record in records:
        if record.n_total < MIN_COUNTS:
            raise InsufficientCountsError(
                f'{record.basis.value}-basis record has {record.n_total} counts, need {MIN_COUNTS}'
            )
    freqs = [record.frequencies() for record in records]
    estimate = estimate_from_probs(*freqs)
    pz, px = freqs[0].as_array(), freqs[1].as_array()

    stderr = {
        'P': _abs_sum_stderr((PATH_FORM,), pz, z.n_total),
        'D_m': _abs_sum_stderr(PROBE_FORMS, pz, z.n_total),
    }
    if y is None:
        stderr['V'] = _abs_sum_stderr((PATH_FORM,), px, x.n_total)
        stderr['V_c'] = _abs_sum_stderr(PROBE_FORMS, px, x.n_total)
    else:
        py = freqs[2].as_array()
        stderr['V'] = _quadrature_stderr((PATH_FORM,), px, x.n_total, py, y.n_total)
        stderr['V_c'] = _quadrature_stderr(PROBE_FORMS, px, x.n_total, py, y.n_total)

    unreliable = tuple(name for name, se in stderr.items() if se is None)
    if unreliable:
        logger.debug(f"theta={math.degrees(z.theta):.3f} deg: error bars unreliable for {', '.join(unreliable)}")
    return EstimateSet(
        theta=z.theta,
        p_pred=estimate.p_pred,
        d_m=estimate.d_m,
        vis=estimate.vis,
        v_c=estimate.v_c,
        stderr=stderr,
        unreliable=unreliable,
    )


# ─── SWEEP ────────────────────────────────────────────────────

class SweepEngine:
    """One source behind the overlap-dephasing channel, evaluated over config.theta_grid.

    `channel` (a PolarizerChannel) only fills the header. The circular Y
    basis is counted whenever config.circular_basis is set or the object
    coherence carries a quadrature part the X analyzer cannot see.
    """

    def __init__(self, state, config, channel=None):
        self.state = state
        self.config = config
        self.channel = channel
        eta = config.eta_overlap
        self.target = state if eta == 1.0 else apply_overlap_dephasing(state, eta)
        self.bases = self._select_bases()

    def _select_bases(self):
        if self.config.circular_basis:
            return (Basis.Z, Basis.X, Basis.Y)
        if has_quadrature_coherence(self.target):
            logger.info("Object coherence is complex: counting in the circular basis as well")
            return (Basis.Z, Basis.X, Basis.Y)
        return (Basis.Z, Basis.X)

    def header(self, mode):
        report = quantity_report(self.target)
        return SweepHeader(
            p_pred=report.p_pred,
            vis=report.vis,
            dist=report.dist,
            # the dephasing channel scales coherence, not the source's entanglement
            c_overlap=quantity_report(self.state).c_overlap,
            w_plus=report.w_plus,
            t=None if self.channel is None else self.channel.t,
            alpha_deg=None if self.channel is None else self.channel.alpha_deg,
            eta=self.config.eta_overlap,
            mode=SweepMode(mode).value,
        )

    def count(self, theta, grid_index, shots=None):
        """One CountRecord per basis in self.bases at probe angle `theta`."""
        shots = self.config.shots_per_point if shots is None else shots
        return [
            simulate_counts(self.target, theta, basis, shots, point_rng(self.config.seed, grid_index, basis))
            for basis in self.bases
        ]

    def analytic_points(self):
        grid = self.config.theta_grid
        thetas = np.asarray(grid)
        d_m = measured_distinguishability(self.target, thetas)
        v_c = conditioned_visibility(self.target, thetas)
        return [
            SweepPoint(
                theta=th,
                probs_z=_probs_tuple(coincidence_probs(self.target, th, Basis.Z)),
                probs_x=_probs_tuple(coincidence_probs(self.target, th, Basis.X)),
                d_m=float(d_m[i]),
                v_c=float(v_c[i]),
            )
            for i, th in enumerate(grid)
        ]

    def monte_carlo_point(self, index):
        theta = self.config.theta_grid[index]
        records = self.count(theta, index)
        estimate = estimate_from_counts(*records)
        return SweepPoint(
            theta=theta,
            probs_z=_probs_tuple(records[0].frequencies()),
            probs_x=_probs_tuple(records[1].frequencies()),
            d_m=estimate.d_m,
            v_c=estimate.v_c,
            stderr=estimate.stderr,
        )

    def run(self, mode=SweepMode.ANALYTIC):
        """D_m, V_c and coincidence probabilities in grid order."""
        mode = SweepMode(mode)
        grid = self.config.theta_grid
        logger.info(f"Sweep started: {len(grid)} points, mode={mode.value}, eta={self.config.eta_overlap}")

        if mode is SweepMode.ANALYTIC:
            points = self.analytic_points()
        elif self.config.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                points = list(pool.map(self.monte_carlo_point, range(len(grid))))
        else:
            points = [self.monte_carlo_point(i) for i in range(len(grid))]

        flagged = sum(1 for p in points if p.stderr and any(se is None for se in p.stderr.values()))
        if flagged:
            logger.info(f"{flagged} of {len(points)} points sit near a kink; their error bars are omitted")
        logger.info(f"Sweep finished: {len(points)} points")
        return SweepSeries(header=self.header(mode), points=tuple(points))


def _probs_tuple(cs):
    return (cs.p_pp, cs.p_pm, cs.p_mp, cs.p_mm)


def sweep(state, config, mode=SweepMode.ANALYTIC, channel=None):
    """Shorthand for SweepEngine(state, config, channel).run(mode)."""
    return SweepEngine(state, config, channel).run(mode)


def convergence_rms(state, theta_grid, shots, seeds, eta=1.0):
    """Mean over seeds of the RMS deviation of Monte Carlo D_m and V_c from their analytic values."""
    analytic = sweep(state, SimConfig(shots_per_point=shots, eta_overlap=eta, theta_grid=theta_grid))
    reference = np.array([[p.d_m, p.v_c] for p in analytic.points])
    deviations = []
    for seed in seeds:
        config = SimConfig(shots_per_point=shots, seed=seed, eta_overlap=eta, theta_grid=theta_grid)
        measured = sweep(state, config, SweepMode.MONTE_CARLO)
        values = np.array([[p.d_m, p.v_c] for p in measured.points])
        deviations.append(math.sqrt(float(np.mean((values - reference) ** 2))))
    return float(np.mean(deviations))
