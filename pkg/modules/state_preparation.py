"""
State Preparation — entangled sources and the partial polarizer.

Builds the singlet, canonical partially entangled states, the state left
after a stack of Brewster plates on the object photon, and random test states.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from modules.errors import DomainError
from modules.state_algebra import (
    ObjectOperator,
    PureState,
    rotation,
    wrap_half_turn,
)

logger = logging.getLogger(__name__)

# Amplitude transmittivity of one glass plate for the suppressed polarization.
PER_PLATE_FACTOR = 0.8513


# ─── POLARIZER ────────────────────────────────────────────────

@dataclass(frozen=True)
class PolarizerChannel:
    """Partial polarizer on the object photon: axis `alpha` (rad), amplitude transmittivity `t`.

    Light polarized along the axis passes unchanged, light perpendicular to it
    is attenuated to `t`. The axis is stored on (-pi/2, pi/2].
    """

    alpha: float
    t: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise DomainError('polarizer angle must be finite')
        if not (math.isfinite(self.t) and 0.0 <= self.t <= 1.0):
            raise DomainError(f'transmittivity must lie in [0, 1], got {self.t}')
        object.__setattr__(self, 'alpha', wrap_half_turn(self.alpha))

    @classmethod
    def from_degrees(cls, alpha_deg, t, intensity=False):
        """`intensity=True` treats `t` as an intensity transmittivity (amplitude = sqrt)."""
        if intensity:
            if not (0.0 <= t <= 1.0):
                raise DomainError(f'intensity transmittivity must lie in [0, 1], got {t}')
            t = math.sqrt(t)
        return cls(math.radians(alpha_deg), t)

    @property
    def alpha_deg(self):
        return math.degrees(self.alpha)

    def operator(self):
        """R(alpha) · diag(1, t) · R(-alpha)."""
        matrix = rotation(self.alpha) @ np.diag([1.0, self.t]) @ rotation(-self.alpha)
        return ObjectOperator(matrix)

    def coefficients(self):
        return polarizer_coeffs(self)

    def theta_zero(self):
        """Probe angle at which the |O+M-> amplitude vanishes, in (-pi/2, pi/2]."""
        a1, _, a3 = polarizer_coeffs(self)
        return wrap_half_turn(math.atan2(-a3, a1))


@dataclass(frozen=True)
class PlateStack:
    n_plates: int
    per_plate_factor: float = PER_PLATE_FACTOR

    def __post_init__(self):
        if isinstance(self.n_plates, bool) or not isinstance(self.n_plates, int) or self.n_plates < 0:
            raise DomainError(f'plate count must be a non-negative integer, got {self.n_plates!r}')
        if not (0.0 < self.per_plate_factor <= 1.0):
            raise DomainError(f'per-plate factor must lie in (0, 1], got {self.per_plate_factor}')

    @property
    def transmittivity(self):
        return plates_to_t(self)

    def channel(self, alpha):
        return PolarizerChannel(alpha, self.transmittivity)


def plates_to_t(stack):
    """Amplitude transmittivity of a plate stack, t = factor ** n."""
    return stack.per_plate_factor ** stack.n_plates


def polarizer_coeffs(p):
    """(a1, a2, a3) of the normalized singlet after the partial polarizer.

    The post-selected state is a1|O+M+> + a3|O+M-> - a3|O-M+> - a2|O-M->.
    """
    c, s = math.cos(p.alpha), math.sin(p.alpha)
    n = math.sqrt(1.0 + p.t * p.t)
    a1 = (p.t + (1.0 - p.t) * c * c) / n
    a2 = (p.t + (1.0 - p.t) * s * s) / n
    a3 = (1.0 - p.t) * s * c / n
    return a1, a2, a3


def prepare_after_polarizer(p):
    """Singlet through the partial polarizer; returns (state, success probability)."""
    a1, a2, a3 = p.coefficients()
    state = PureState.from_amplitudes(a1, a3, -a3, -a2)
    success = (1.0 + p.t * p.t) / 2.0
    logger.debug(f"Polarizer alpha={p.alpha_deg:.3f} deg t={p.t:.5f}: success={success:.6f}")
    return state, success


# ─── SOURCES ──────────────────────────────────────────────────

def make_singlet():
    """(|O+M+> - |O-M->)/sqrt(2), the source state in the detection basis."""
    r = 1.0 / math.sqrt(2.0)
    return PureState.from_amplitudes(r, 0.0, 0.0, -r)


def make_canonical(w_plus, phi, c):
    """sqrt(w+)|O+M+> + e^{i phi} sqrt(w-)|O-> (c|M+> + sqrt(1-c^2)|M->)."""
    if not (0.0 <= w_plus <= 1.0):
        raise DomainError(f'w_plus must lie in [0, 1], got {w_plus}')
    if not (0.0 <= c <= 1.0):
        raise DomainError(f'c must lie in [0, 1], got {c}')
    if not math.isfinite(phi):
        raise DomainError('phi must be finite')
    w_minus = 1.0 - w_plus
    phase = complex(math.cos(phi), math.sin(phi))
    return PureState.from_amplitudes(
        math.sqrt(w_plus),
        0.0,
        phase * c * math.sqrt(w_minus),
        phase * math.sqrt(w_minus * (1.0 - c * c)),
    )


def random_pure_state(seed, real_probe=True):
    """Random test state from an int seed or a numpy Generator.

    real_probe=True draws real probe amplitudes uniformly on the 3-sphere and
    attaches a uniform phase to the O- branch (the states a source, a partial
    polarizer and relative-phase optics can reach). real_probe=False draws a
    Haar-uniform complex 4-vector.
    """
    rng = np.random.default_rng(seed)
    if real_probe:
        v = rng.standard_normal(4)
        amps = (v / np.linalg.norm(v)).astype(np.complex128)
        amps[2:] *= np.exp(1j * rng.uniform(-math.pi, math.pi))
    else:
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        amps = v / np.linalg.norm(v)
    return PureState(amps)
