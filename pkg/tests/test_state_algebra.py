import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from modules.errors import DomainError, NotHermitianError, ZeroNormError
from modules.state_algebra import (
    DensityOperator,
    ObjectOperator,
    ProbeOperator,
    PureState,
    apply_object,
    apply_probe,
    partial_trace_probe,
    rotate_probe,
    rotation,
    to_density,
    to_pure,
    trace_norm_2x2,
    wrap_half_turn,
)
from modules.state_preparation import random_pure_state

angles = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi, allow_nan=False)
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


# ─── STATES ───────────────────────────────────────────────────

def test_pure_state_rejects_unnormalized_amplitudes():
    with pytest.raises(DomainError):
        PureState.from_amplitudes(1.0, 1.0, 0.0, 0.0)


def test_pure_state_rejects_non_finite_amplitudes():
    with pytest.raises(DomainError):
        PureState.from_amplitudes(float('nan'), 0.0, 0.0, 0.0)


def test_pure_state_is_read_only(singlet):
    with pytest.raises(ValueError):
        singlet.amps[0] = 1.0


def test_from_amplitudes_normalizes_on_request():
    state = PureState.from_amplitudes(3.0, 4.0j, 0.0, 0.0, normalize=True)
    assert_allclose(state.amps, [0.6, 0.8j, 0.0, 0.0], atol=1e-15)
    with pytest.raises(ZeroNormError):
        PureState.from_amplitudes(0.0, 0.0, 0.0, 0.0, normalize=True)


def test_density_operator_checks_invariants():
    with pytest.raises(NotHermitianError):
        DensityOperator(np.diag([1.0, 0, 0, 0]) + np.eye(4, k=1) * 0.1)
    with pytest.raises(DomainError):
        DensityOperator(np.diag([0.5, 0.5, 0.5, 0.0]))
    with pytest.raises(DomainError):
        DensityOperator(np.diag([1.5, -0.5, 0.0, 0.0]))


# ─── to_density / to_pure ─────────────────────────────────────

def test_singlet_density_matrix(singlet):
    rho = to_density(singlet)
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = 0.5
    expected[0, 3] = expected[3, 0] = -0.5
    assert_allclose(rho.m, expected, atol=1e-15)


def test_basis_state_density_matrix():
    rho = to_density(PureState.from_amplitudes(1.0, 0.0, 0.0, 0.0))
    expected = np.zeros((4, 4))
    expected[0, 0] = 1.0
    assert_allclose(rho.m, expected, atol=0)
    assert rho.purity == pytest.approx(1.0)


@settings(deadline=None, max_examples=200)
@given(seed=seeds, real_probe=st.booleans())
def test_density_of_random_state_is_rank_one(seed, real_probe):
    state = random_pure_state(seed, real_probe=real_probe)
    rho = to_density(state)
    assert abs(np.trace(rho.m) - 1.0) <= 1e-12
    assert rho.purity == pytest.approx(1.0, abs=1e-12)
    recovered = to_pure(rho)
    overlap = abs(np.vdot(recovered.amps, state.amps))
    assert overlap == pytest.approx(1.0, abs=1e-10)


def test_to_pure_rejects_mixed_operator():
    with pytest.raises(DomainError):
        to_pure(DensityOperator(np.eye(4) / 4))


# ─── LOCAL OPERATORS ──────────────────────────────────────────

def test_identity_filter_keeps_state(case_a):
    state, success = apply_object(ObjectOperator.identity(), case_a)
    assert state.allclose(case_a, atol=1e-15)
    assert success == pytest.approx(1.0, abs=1e-15)


def test_full_polarizer_selects_one_branch(singlet):
    state, success = apply_object(ObjectOperator(np.diag([1.0, 0.0])), singlet)
    assert_allclose(state.amps, [1.0, 0.0, 0.0, 0.0], atol=1e-15)
    assert success == pytest.approx(0.5)


def test_partial_polarizer_success_probability(singlet):
    _, success = apply_object(ObjectOperator(np.diag([1.0, 0.2])), singlet)
    assert success == pytest.approx(0.52, abs=1e-12)


def test_amplifying_operator_is_rejected(singlet):
    with pytest.raises(DomainError):
        apply_object(ObjectOperator(np.diag([2.0, 1.0])), singlet)


def test_absorbing_filter_raises_zero_norm():
    state = PureState.from_amplitudes(0.0, 0.0, 1.0, 0.0)
    with pytest.raises(ZeroNormError):
        apply_object(ObjectOperator(np.diag([1.0, 0.0])), state)


def _random_unitary(rng):
    q, r = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_random_filters_keep_success_in_unit_interval():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        strengths = np.diag(rng.uniform(0.05, 1.0, 2))
        op = ObjectOperator(_random_unitary(rng) @ strengths @ _random_unitary(rng))
        state = random_pure_state(rng, real_probe=False)
        filtered, success = apply_object(op, state)
        kept = float(np.sum(np.abs(op.matrix @ state.amplitude_matrix) ** 2))
        assert 0.0 < success <= 1.0
        assert success == pytest.approx(kept, abs=1e-12)
        assert np.linalg.norm(filtered.amps) == pytest.approx(1.0, abs=1e-12)


def test_probe_filter_acts_on_columns(singlet):
    state, success = apply_probe(ProbeOperator(np.diag([0.0, 1.0])), singlet)
    assert_allclose(state.amps, [0.0, 0.0, 0.0, -1.0], atol=1e-15)
    assert success == pytest.approx(0.5)


# ─── ROTATION ─────────────────────────────────────────────────

def test_rotation_matrix_convention():
    assert_allclose(rotation(math.pi / 2), [[0.0, 1.0], [-1.0, 0.0]], atol=1e-15)


def test_rotate_probe_zero_is_identity(case_a):
    assert rotate_probe(case_a, 0.0).allclose(case_a, atol=1e-15)


@pytest.mark.parametrize('theta', [0.1, math.pi / 6, -0.7, 1.4])
def test_rotated_singlet_pattern(singlet, theta):
    r = 1.0 / math.sqrt(2.0)
    c, s = math.cos(theta), math.sin(theta)
    assert_allclose(rotate_probe(singlet, theta).amps, [r * c, r * s, r * s, -r * c], atol=1e-15)


def test_case_a_pm_amplitude_vanishes_at_theta_zero(case_a, case_a_channel):
    theta_zero = case_a_channel.theta_zero()
    assert theta_zero == pytest.approx(-0.5662, abs=1e-4)
    assert abs(rotate_probe(case_a, theta_zero).amp_pm) < 1e-9


@settings(deadline=None, max_examples=200)
@given(seed=seeds, theta=angles)
def test_rotate_probe_round_trip(seed, theta):
    state = random_pure_state(seed, real_probe=False)
    back = rotate_probe(rotate_probe(state, theta), -theta)
    assert back.allclose(state, atol=1e-12)


@settings(deadline=None, max_examples=200)
@given(seed=seeds, a=angles, b=angles)
def test_rotations_compose(seed, a, b):
    state = random_pure_state(seed)
    assert rotate_probe(rotate_probe(state, a), b).allclose(rotate_probe(state, a + b), atol=1e-12)


@settings(deadline=None, max_examples=200)
@given(seed=seeds, theta=angles)
def test_rotation_keeps_branch_weights(seed, theta):
    state = random_pure_state(seed, real_probe=False)
    rotated = rotate_probe(state, theta)
    for o in (0, 1):
        before = np.sum(np.abs(state.object_branch(o)) ** 2)
        assert np.sum(np.abs(rotated.object_branch(o)) ** 2) == pytest.approx(before, abs=1e-12)


@given(angle=st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
def test_wrap_half_turn_range(angle):
    wrapped = wrap_half_turn(angle)
    assert -math.pi / 2 - 1e-12 <= wrapped <= math.pi / 2 + 1e-12
    assert math.sin(2 * wrapped) == pytest.approx(math.sin(2 * angle), abs=1e-9)


# ─── REDUCTIONS ───────────────────────────────────────────────

@settings(deadline=None, max_examples=100)
@given(seed=seeds)
def test_partial_trace_paths_agree(seed):
    state = random_pure_state(seed, real_probe=False)
    reduced = partial_trace_probe(to_density(state))
    assert_allclose(reduced, partial_trace_probe(state), atol=1e-12)
    assert abs(np.trace(reduced) - 1.0) <= 1e-12


def test_trace_norm_of_indefinite_matrix():
    assert trace_norm_2x2([[1.0, 0.0], [0.0, -0.25]]) == pytest.approx(1.25)
    assert trace_norm_2x2([[0.0, 1j], [-1j, 0.0]]) == pytest.approx(2.0)


def test_trace_norm_rejects_non_hermitian_input():
    with pytest.raises(NotHermitianError):
        trace_norm_2x2([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(DomainError):
        trace_norm_2x2(np.eye(3))
