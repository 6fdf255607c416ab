"""
Complementarity — path and visibility quantities of the object/probe pair.

Every quantity accepts a PureState (closed forms on the amplitudes) or a
DensityOperator (block traces, trace norm and rotated diagonals). The second
path serves mixed states and is the oracle the first is tested against.
θ-dependent quantities accept a float or a numpy array of probe angles.
"""
import enum
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

from modules.errors import (
    DegenerateBranchError,
    DomainError,
    NotNormalizedError,
    RootNotFoundError,
    SettingsMismatchError,
)
from modules.state_algebra import (
    NORM_TOL,
    ROOT_TOL,
    DensityOperator,
    PureState,
    rotate_probe,
    rotation,
    to_pure,
    trace_norm_2x2,
    wrap_half_turn,
)

logger = logging.getLogger(__name__)

DEGENERATE_WEIGHT = 1e-12
PROBS_SUM_TOL = 1e-6
SETTINGS_TOL = 1e-12
QUADRATURE_TOL = 1e-12


class Basis(str, enum.Enum):
    Z = 'Z'    # 0/90 deg
    X = 'X'    # 45/135 deg
    Y = 'Y'    # right/left circular

    @property
    def seed_index(self):
        return ('Z', 'X', 'Y').index(self.value)


_SQRT_HALF = 1.0 / math.sqrt(2.0)

# Object analyzer bras; row 0 is the "+" outcome.
ANALYZERS = {
    Basis.Z: np.eye(2, dtype=np.complex128),
    Basis.X: np.array([[1, 1], [1, -1]], dtype=np.complex128) * _SQRT_HALF,
    Basis.Y: np.array([[1, -1j], [1, 1j]], dtype=np.complex128) * _SQRT_HALF,
}

# Linear forms over (p_pp, p_pm, p_mp, p_mm).
PATH_FORM = np.array([1.0, 1.0, -1.0, -1.0])
PROBE_FORMS = (np.array([1.0, 0.0, -1.0, 0.0]), np.array([0.0, 1.0, 0.0, -1.0]))


# ─── TYPES ────────────────────────────────────────────────────

@dataclass(frozen=True)
class CoincidenceSet:
    """Joint detection probabilities at probe angle `theta` with the object analyzer in `basis`.

    The first index is the object outcome, the second the probe outcome.
    """

    basis: Basis
    theta: float
    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def __post_init__(self):
        object.__setattr__(self, 'basis', Basis(self.basis))
        for name in ('p_pp', 'p_pm', 'p_mp', 'p_mm'):
            value = getattr(self, name)
            if not (math.isfinite(value) and -NORM_TOL <= value <= 1.0 + NORM_TOL):
                raise DomainError(f'{name}={value!r} is not a probability')

    @property
    def total(self):
        return self.p_pp + self.p_pm + self.p_mp + self.p_mm

    def as_array(self):
        return np.array([self.p_pp, self.p_pm, self.p_mp, self.p_mm])


@dataclass(frozen=True)
class QuantityReport:
    p_pred: float
    vis: float
    vis0: float
    dist: float
    c_overlap: Optional[float]    # None when one branch is empty
    w_plus: float
    likelihood: float

    def as_dict(self):
        return {
            'P': self.p_pred,
            'V': self.vis,
            'V0': self.vis0,
            'D': self.dist,
            'c': self.c_overlap,
            'w_plus': self.w_plus,
            'L': self.likelihood,
        }


class ErasureEstimate(NamedTuple):
    p_pred: float
    d_m: float
    vis: float
    v_c: float


@dataclass(frozen=True)
class MLStrategy:
    """Path guess for each probe outcome and the resulting success probability."""

    guess_on_plus: str
    guess_on_minus: str
    success_prob: float


# ─── HELPERS ──────────────────────────────────────────────────

def _weights(state):
    if isinstance(state, PureState):
        return (float(np.sum(np.abs(state.object_branch(0)) ** 2)),
                float(np.sum(np.abs(state.object_branch(1)) ** 2)))
    return (float(np.real(np.trace(state.block(0, 0)))),
            float(np.real(np.trace(state.block(1, 1)))))


def _coherence(state):
    """Tr <O+| rho |O->, the object coherence."""
    if isinstance(state, PureState):
        return complex(np.vdot(state.object_branch(1), state.object_branch(0)))
    return complex(np.trace(state.block(0, 1)))


def _coherence_block(state):
    """rho_+- = <O+| rho |O-> on the probe space."""
    if isinstance(state, PureState):
        return np.outer(state.object_branch(0), state.object_branch(1).conj())
    return state.block(0, 1)


def has_quadrature_coherence(state, tol=QUADRATURE_TOL):
    """True when some rotated diagonal of rho_+- is not real.

    The X analyzer only sees the real part of <k_theta| rho_+- |k_theta>, so
    such states need the circular basis for V and V_c.
    """
    im = np.imag(_coherence_block(state))
    return max(abs(im[0, 0]), abs(im[1, 1]), abs(im[0, 1] + im[1, 0])) > tol


def _difference_operator(state):
    """rho_++ - rho_-- on the probe space."""
    if isinstance(state, PureState):
        x, z = state.object_branch(0), state.object_branch(1)
        return np.outer(x, x.conj()) - np.outer(z, z.conj())
    return state.block(0, 0) - state.block(1, 1)


def _rotated_diagonal(m, theta):
    """Diagonal of U m U^T for the amplitude rotation U = rotation(-theta); shape (2, n)."""
    c, s = np.cos(theta), np.sin(theta)
    cross = m[0, 1] + m[1, 0]
    d0 = c * c * m[0, 0] - c * s * cross + s * s * m[1, 1]
    d1 = s * s * m[0, 0] + c * s * cross + c * c * m[1, 1]
    return np.stack([d0, d1])


def _rotated_amplitudes(v, theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _scalar_or_array(values, theta):
    if np.ndim(theta) == 0:
        return float(values[0])
    return values


def _check_state(state):
    if not isinstance(state, (PureState, DensityOperator)):
        raise DomainError(f'expected PureState or DensityOperator, got {type(state).__name__}')


# ─── SCALAR QUANTITIES ────────────────────────────────────────

def predictability(state):
    """P = |w+ - w-|."""
    _check_state(state)
    w_plus, w_minus = _weights(state)
    return abs(w_plus - w_minus)


def likelihood(state):
    """L = max(w+, w-), the odds of guessing the path from preparation alone."""
    _check_state(state)
    return max(_weights(state))


def visibility(state):
    """V = 2 |Tr rho_+-|."""
    _check_state(state)
    return 2.0 * abs(_coherence(state))


def pre_visibility(state):
    """V0 = sqrt(1 - P^2), the visibility before the object met the probe."""
    p = predictability(state)
    return math.sqrt(max(0.0, 1.0 - p * p))


def distinguishability(state):
    """D = ||rho_++ - rho_--||, the trace norm of the conditional probe difference."""
    _check_state(state)
    if isinstance(state, PureState):
        x, z = state.object_branch(0), state.object_branch(1)
        p = predictability(state)
        det = abs(x[0] * z[1] - x[1] * z[0])
        return math.sqrt(p * p + 4.0 * det * det)
    return trace_norm_2x2(_difference_operator(state))


def entanglement_c(state):
    """c = |<m+|m->|, overlap of the normalized conditional probe states."""
    _check_state(state)
    w_plus, w_minus = _weights(state)
    if min(w_plus, w_minus) < DEGENERATE_WEIGHT:
        raise DegenerateBranchError(f'branch weights ({w_plus:.3e}, {w_minus:.3e}) leave c undefined')
    return min(1.0, abs(_coherence(state)) / math.sqrt(w_plus * w_minus))


def theta_zero(state):
    """Probe angle in (-pi/2, pi/2] where the |O+M-> amplitude vanishes."""
    _check_state(state)
    if isinstance(state, DensityOperator):
        try:
            state = to_pure(state)
        except DomainError as e:
            raise RootNotFoundError(f'theta_zero needs a pure state: {e}') from e
    x = state.object_branch(0)
    lead = x[0] if abs(x[0]) >= abs(x[1]) else x[1]
    if abs(lead) < ROOT_TOL:
        return 0.0
    phase = lead / abs(lead)
    re0, re1 = float(np.real(x[0] / phase)), float(np.real(x[1] / phase))

    def b3(th):
        return math.sin(th) * re0 + math.cos(th) * re1

    if abs(re1) < 1e-15:
        root = 0.0
    elif abs(re0) < 1e-15:
        root = math.pi / 2
    else:
        root = brentq(b3, -math.pi / 2, math.pi / 2, xtol=1e-15)
    root = wrap_half_turn(root)
    residual = abs(math.sin(root) * x[0] + math.cos(root) * x[1])
    if residual > ROOT_TOL:
        raise RootNotFoundError(f'|b3| = {residual:.3e} at the best angle; the O+ branch carries a relative phase')
    return root


def entanglement_c_at_theta_zero(state):
    """c read off the coincidence amplitudes at theta_zero: |b4| / sqrt(|b2|^2 + |b4|^2)."""
    _check_state(state)
    if isinstance(state, DensityOperator):
        state = to_pure(state)
    rotated = rotate_probe(state, theta_zero(state))
    b4_sq = abs(rotated.amp_mp) ** 2
    w_minus = b4_sq + abs(rotated.amp_mm) ** 2
    if w_minus < DEGENERATE_WEIGHT or 1.0 - w_minus < DEGENERATE_WEIGHT:
        raise DegenerateBranchError('c undefined for an empty branch')
    return min(1.0, math.sqrt(b4_sq / w_minus))


def quantity_report(state):
    _check_state(state)
    w_plus, _ = _weights(state)
    try:
        c = entanglement_c(state)
    except DegenerateBranchError:
        c = None
    return QuantityReport(
        p_pred=predictability(state),
        vis=visibility(state),
        vis0=pre_visibility(state),
        dist=distinguishability(state),
        c_overlap=c,
        w_plus=w_plus,
        likelihood=likelihood(state),
    )


# ─── PROBE-ANGLE QUANTITIES ───────────────────────────────────

def measured_distinguishability(state, theta):
    """D_m(theta) = sum_k |<k_theta| rho_++ - rho_-- |k_theta>|."""
    _check_state(state)
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    if isinstance(state, PureState):
        ux = _rotated_amplitudes(state.object_branch(0), thetas)
        uz = _rotated_amplitudes(state.object_branch(1), thetas)
        values = np.sum(np.abs(np.abs(ux) ** 2 - np.abs(uz) ** 2), axis=0)
    else:
        diag = _rotated_diagonal(_difference_operator(state), thetas)
        values = np.sum(np.abs(np.real(diag)), axis=0)
    return _scalar_or_array(values, theta)


def conditioned_visibility(state, theta):
    """V_c(theta) = 2 sum_k |<k_theta| rho_+- |k_theta>|."""
    _check_state(state)
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    if isinstance(state, PureState):
        ux = _rotated_amplitudes(state.object_branch(0), thetas)
        uz = _rotated_amplitudes(state.object_branch(1), thetas)
        values = 2.0 * np.sum(np.abs(ux * uz.conj()), axis=0)
    else:
        diag = _rotated_diagonal(state.block(0, 1), thetas)
        values = 2.0 * np.sum(np.abs(diag), axis=0)
    return _scalar_or_array(values, theta)


def optimal_probe_angle(state):
    """Angle in (-pi/2, pi/2] maximizing D_m: the rotated basis that diagonalizes Re(rho_++ - rho_--)."""
    _check_state(state)
    delta = _difference_operator(state)
    b = float(np.real(delta[0, 0] - delta[1, 1])) / 2.0
    c = -float(np.real(delta[0, 1] + delta[1, 0])) / 2.0
    return wrap_half_turn(math.atan2(c, b) / 2.0)


def kink_angles(state):
    """Angles in (-pi/2, pi/2] where an absolute-value argument of D_m changes sign.

    Each diagonal entry of the rotated difference operator has the form
    A ± (B cos 2θ + C sin 2θ); its zeros are where the D_m curve has corners
    and the maximum-likelihood path guess flips.
    """
    _check_state(state)
    delta = _difference_operator(state)
    a = float(np.real(delta[0, 0] + delta[1, 1])) / 2.0
    b = float(np.real(delta[0, 0] - delta[1, 1])) / 2.0
    c = -float(np.real(delta[0, 1] + delta[1, 0])) / 2.0
    r = math.hypot(b, c)
    if r <= abs(a):
        return []
    shift = math.atan2(c, b)
    roots = []
    for level in (-a / r, a / r):
        spread = math.acos(level)
        roots.extend(wrap_half_turn((shift + sign * spread) / 2.0) for sign in (1.0, -1.0))
    roots.sort()
    unique = []
    for th in roots:
        if not unique or th - unique[-1] > 1e-12:
            unique.append(th)
    if len(unique) > 1 and unique[0] + math.pi - unique[-1] <= 1e-12:
        unique.pop(0)
    return unique


def ml_path_strategy(state, theta):
    """Maximum-likelihood path guess per probe outcome at a scalar probe angle.

    Ties resolve to '+'. The success probability equals (1 + D_m) / 2.
    """
    probs = coincidence_probs(state, theta, Basis.Z)
    guesses = []
    success = 0.0
    for p_plus, p_minus in ((probs.p_pp, probs.p_mp), (probs.p_pm, probs.p_mm)):
        guesses.append('+' if p_plus >= p_minus else '-')
        success += max(p_plus, p_minus)
    return MLStrategy(guesses[0], guesses[1], success)


# ─── COINCIDENCES AND ESTIMATION ──────────────────────────────

def coincidence_probs(state, theta, basis=Basis.Z):
    """Exact joint probabilities for the object analyzer `basis` and probe angle `theta`."""
    _check_state(state)
    analyzer = ANALYZERS[Basis(basis)]
    u = rotation(-theta)
    if isinstance(state, PureState):
        psi = analyzer @ state.amplitude_matrix @ u.T
        probs = (np.abs(psi) ** 2).reshape(4)
    else:
        k = np.kron(analyzer, u)
        probs = np.real(np.diag(k @ state.m @ k.conj().T)).clip(0.0, 1.0)
    return CoincidenceSet(Basis(basis), float(theta), *map(float, probs))


def _check_settings(sets):
    expected = (Basis.Z, Basis.X, Basis.Y)
    theta = sets[0].theta
    for expected_basis, cs in zip(expected, sets):
        if cs.basis is not expected_basis:
            raise SettingsMismatchError(f'expected basis {expected_basis.value}, got {cs.basis.value}')
        if abs(cs.theta - theta) > SETTINGS_TOL:
            raise SettingsMismatchError(f'probe angles differ: {theta} vs {cs.theta}')
        if abs(cs.total - 1.0) > PROBS_SUM_TOL:
            raise NotNormalizedError(f'{cs.basis.value}-basis probabilities sum to {cs.total:.9f}')


def estimate_from_probs(z, x, y=None):
    """(P, D_m, V, V_c) from Z-, X- and optionally Y-basis coincidence probabilities.

    Without `y` the visibilities use the 45/135 degree differences alone,
    exact when the object coherence is real in the rotated probe basis. With
    `y` the in-phase and quadrature differences combine in quadrature and the
    estimates are exact for any state.
    """
    sets = (z, x) if y is None else (z, x, y)
    _check_settings(sets)
    pz, px = z.as_array(), x.as_array()
    p_pred = abs(PATH_FORM @ pz)
    d_m = sum(abs(form @ pz) for form in PROBE_FORMS)
    if y is None:
        vis = abs(PATH_FORM @ px)
        v_c = sum(abs(form @ px) for form in PROBE_FORMS)
    else:
        py = y.as_array()
        vis = math.hypot(PATH_FORM @ px, PATH_FORM @ py)
        v_c = sum(math.hypot(form @ px, form @ py) for form in PROBE_FORMS)
    return ErasureEstimate(float(p_pred), float(d_m), float(vis), float(v_c))
