"""
State Algebra — exact two-photon linear algebra for the object/probe pair.

Basis order is object-major: (O+M+, O+M-, O-M+, O-M-). With that ordering a
4x4 operator splits into 2x2 probe blocks <O_o| rho |O_o'>, and the partial
trace over the probe is the matrix of block traces.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from modules.errors import DomainError, NotHermitianError, ZeroNormError

logger = logging.getLogger(__name__)


# ─── TOLERANCES ───────────────────────────────────────────────

NORM_TOL = 1e-12          # construction invariants
EQUALITY_TOL = 1e-10      # derived equalities between evaluation paths
ROOT_TOL = 1e-9           # root finding
EIGEN_FLOOR = -1e-10      # smallest admissible density eigenvalue
HERMITIAN_TOL = 1e-10     # trace_norm_2x2 input check
ABSORBED_NORM = 1e-14     # below this a filtered state counts as absorbed

BASIS_LABELS = ('O+M+', 'O+M-', 'O-M+', 'O-M-')


def _readonly(values, shape):
    arr = np.array(values, dtype=np.complex128).reshape(shape)
    arr.setflags(write=False)
    return arr


def wrap_half_turn(angle):
    """Map an angle onto (-pi/2, pi/2]; polarization axes repeat every half turn."""
    return angle - math.pi * math.ceil((angle - math.pi / 2) / math.pi)


def rotation(angle):
    """Rotation matrix [[cos, sin], [-sin, cos]] taking |M+>,|M-> to |M+(angle)>,|M-(angle)>."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s], [-s, c]])


# ─── STATES ───────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized two-photon state; `amps` holds the four basis coefficients."""

    amps: np.ndarray

    def __post_init__(self):
        amps = _readonly(self.amps, (4,))
        if not np.all(np.isfinite(amps)):
            raise DomainError('amplitudes must be finite')
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise DomainError(f'state is not normalized (squared norm {norm_sq!r})')
        object.__setattr__(self, 'amps', amps)

    @classmethod
    def from_amplitudes(cls, amp_pp, amp_pm, amp_mp, amp_mm, normalize=False):
        amps = np.array([amp_pp, amp_pm, amp_mp, amp_mm], dtype=np.complex128)
        if normalize:
            norm = float(np.linalg.norm(amps))
            if norm < ABSORBED_NORM:
                raise ZeroNormError('cannot normalize a zero vector')
            amps = amps / norm
        return cls(amps)

    @property
    def amp_pp(self):
        return complex(self.amps[0])

    @property
    def amp_pm(self):
        return complex(self.amps[1])

    @property
    def amp_mp(self):
        return complex(self.amps[2])

    @property
    def amp_mm(self):
        return complex(self.amps[3])

    @property
    def amplitude_matrix(self):
        """2x2 view: rows index the object path, columns the probe state."""
        return self.amps.reshape(2, 2)

    def object_branch(self, o):
        """Unnormalized probe amplitudes conditioned on path O+ (o=0) or O- (o=1)."""
        return self.amps[2 * o:2 * o + 2]

    def allclose(self, other, atol=EQUALITY_TOL):
        return bool(np.allclose(self.amps, other.amps, rtol=0.0, atol=atol))

    def __repr__(self):
        parts = ', '.join(f'{label}={a:.6g}' for label, a in zip(BASIS_LABELS, self.amps))
        return f'PureState({parts})'


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive 4x4 operator over the object-major basis."""

    m: np.ndarray

    def __post_init__(self):
        m = _readonly(self.m, (4, 4))
        if not np.all(np.isfinite(m)):
            raise DomainError('density matrix entries must be finite')
        asym = float(np.max(np.abs(m - m.conj().T)))
        if asym > NORM_TOL:
            raise NotHermitianError(f'density matrix asymmetry {asym:.3e}')
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > NORM_TOL:
            raise DomainError(f'density matrix trace {trace!r} != 1')
        lowest = float(np.linalg.eigvalsh(m)[0])
        if lowest < EIGEN_FLOOR:
            raise DomainError(f'density matrix has negative eigenvalue {lowest:.3e}')
        object.__setattr__(self, 'm', m)

    def block(self, o, o2):
        """Probe operator <O_o| rho |O_o2> (2x2)."""
        return self.m[2 * o:2 * o + 2, 2 * o2:2 * o2 + 2]

    @property
    def purity(self):
        return float(np.real(np.trace(self.m @ self.m)))


# ─── LOCAL OPERATORS ──────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class _LocalOperator:
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _readonly(self.matrix, (2, 2))
        if not np.all(np.isfinite(matrix)):
            raise DomainError('operator entries must be finite')
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def identity(cls):
        return cls(np.eye(2))

    def singular_values(self):
        return np.linalg.svd(self.matrix, compute_uv=False)

    def is_filter(self):
        """True when the operator cannot amplify (both singular values <= 1)."""
        return bool(self.singular_values()[0] <= 1.0 + NORM_TOL)


class ObjectOperator(_LocalOperator):
    """2x2 operator acting on the object factor (op ⊗ identity)."""


class ProbeOperator(_LocalOperator):
    """2x2 operator acting on the probe factor (identity ⊗ op)."""


def _renormalize(psi):
    norm_sq = float(np.sum(np.abs(psi) ** 2))
    if math.sqrt(norm_sq) < ABSORBED_NORM:
        raise ZeroNormError('state fully absorbed by the filter')
    state = PureState(psi.reshape(4) / math.sqrt(norm_sq))
    return state, min(norm_sq, 1.0)


# ─── OPERATIONS ───────────────────────────────────────────────

def to_density(state):
    """rho = |psi><psi|."""
    return DensityOperator(np.outer(state.amps, state.amps.conj()))


def to_pure(rho, tol=EQUALITY_TOL):
    """Recover the state vector of a rank-1 density operator (global phase fixed)."""
    values, vectors = np.linalg.eigh(rho.m)
    if values[-1] < 1.0 - tol:
        raise DomainError(f'operator is mixed (largest eigenvalue {values[-1]:.12f})')
    vec = vectors[:, -1]
    lead = vec[int(np.argmax(np.abs(vec)))]
    vec = vec * (abs(lead) / lead)
    return PureState(vec / np.linalg.norm(vec))


def apply_object(op, state):
    """Apply op ⊗ identity and post-select; returns (state, success probability)."""
    if not op.is_filter():
        raise DomainError(f'object operator amplifies (singular values {op.singular_values()})')
    return _renormalize(op.matrix @ state.amplitude_matrix)


def apply_probe(op, state):
    """Apply identity ⊗ op and post-select; returns (state, success probability)."""
    if not op.is_filter():
        raise DomainError(f'probe operator amplifies (singular values {op.singular_values()})')
    return _renormalize(state.amplitude_matrix @ op.matrix.T)


def rotate_probe(state, theta):
    """Re-express the amplitudes in the rotated probe basis {|M+(theta)>, |M-(theta)>}."""
    rotated, _ = apply_probe(ProbeOperator(rotation(-theta)), state)
    return rotated


def partial_trace_probe(rho):
    """Reduced object operator Tr_M(rho) as a 2x2 array."""
    if isinstance(rho, PureState):
        psi = rho.amplitude_matrix
        return psi @ psi.conj().T
    return np.array([[np.trace(rho.block(o, o2)) for o2 in (0, 1)] for o in (0, 1)])


def trace_norm_2x2(h):
    """Trace-class norm |l1| + |l2| of a Hermitian 2x2 matrix."""
    h = np.asarray(h, dtype=np.complex128)
    if h.shape != (2, 2):
        raise DomainError(f'expected a 2x2 matrix, got shape {h.shape}')
    asym = float(np.max(np.abs(h - h.conj().T)))
    if asym > HERMITIAN_TOL:
        raise NotHermitianError(f'matrix asymmetry {asym:.3e} exceeds {HERMITIAN_TOL}')
    return float(np.sum(np.abs(np.linalg.eigvalsh(h))))
