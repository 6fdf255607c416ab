import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from modules.complementarity import entanglement_c, quantity_report, visibility
from modules.errors import DomainError
from modules.state_algebra import apply_object
from modules.state_preparation import (
    PER_PLATE_FACTOR,
    PlateStack,
    PolarizerChannel,
    make_canonical,
    make_singlet,
    plates_to_t,
    polarizer_coeffs,
    prepare_after_polarizer,
    random_pure_state,
)

R = 1.0 / math.sqrt(2.0)


def test_singlet_amplitudes(singlet):
    assert_allclose(singlet.amps, [R, 0.0, 0.0, -R], atol=0)


def test_canonical_state_layout():
    state = make_canonical(0.25, math.pi / 2, 0.6)
    assert_allclose(state.amps, [0.5, 0.0, 1j * 0.6 * math.sqrt(0.75), 1j * 0.8 * math.sqrt(0.75)], atol=1e-15)


def test_canonical_round_trip():
    rng = np.random.default_rng(31)
    for w_plus, phi, c in zip(rng.uniform(0.01, 0.99, 10_000), rng.uniform(-math.pi, math.pi, 10_000),
                              rng.uniform(0.0, 1.0, 10_000)):
        report = quantity_report(make_canonical(w_plus, phi, c))
        assert report.w_plus == pytest.approx(w_plus, abs=1e-12)
        assert report.c_overlap == pytest.approx(c, abs=1e-9)


def test_canonical_case_a_parameters():
    state = make_canonical(0.5323, 0.0, 0.9227)
    assert visibility(state) == pytest.approx(0.921, abs=1e-3)
    assert entanglement_c(state) == pytest.approx(0.9227, abs=1e-12)


@pytest.mark.parametrize('w_plus, c', [(-0.1, 0.5), (1.1, 0.5), (0.5, -0.01), (0.5, 1.2)])
def test_canonical_rejects_out_of_range_parameters(w_plus, c):
    with pytest.raises(DomainError):
        make_canonical(w_plus, 0.0, c)


def test_case_a_coefficients(case_a_channel):
    a1, a2, a3 = polarizer_coeffs(case_a_channel)
    assert a1 == pytest.approx(0.615709, abs=2e-6)
    assert a2 == pytest.approx(0.560988, abs=2e-6)
    assert a3 == pytest.approx(0.391277, abs=2e-6)
    assert a1 ** 2 + a2 ** 2 + 2 * a3 ** 2 == pytest.approx(1.0, abs=1e-14)


def test_prepared_state_sign_pattern(case_a, case_a_channel):
    a1, a2, a3 = polarizer_coeffs(case_a_channel)
    assert_allclose(case_a.amps, [a1, a3, -a3, -a2], atol=0)


@pytest.mark.parametrize('alpha_deg, t', [(43.0, 0.2), (21.0, 0.324), (0.0, 0.2), (90.0, 0.0), (-60.0, 0.7)])
def test_closed_form_matches_operator_path(alpha_deg, t):
    channel = PolarizerChannel.from_degrees(alpha_deg, t)
    closed, success = prepare_after_polarizer(channel)
    filtered, filtered_success = apply_object(channel.operator(), make_singlet())
    assert closed.allclose(filtered, atol=1e-12)
    assert success == pytest.approx(filtered_success, abs=1e-12)
    assert success == pytest.approx((1 + t * t) / 2, abs=1e-15)


def test_polarizer_operator_is_a_filter(case_a_channel):
    values = case_a_channel.operator().singular_values()
    assert_allclose(sorted(values), [0.2, 1.0], atol=1e-12)


def test_intensity_transmittivity_is_square_rooted():
    assert PolarizerChannel.from_degrees(10.0, 0.04, intensity=True).t == pytest.approx(0.2)


def test_axis_repeats_every_half_turn(case_a_channel):
    turned = PolarizerChannel.from_degrees(43.0 + 180.0, 0.2)
    assert turned.alpha == pytest.approx(case_a_channel.alpha, abs=1e-12)
    assert_allclose(polarizer_coeffs(turned), polarizer_coeffs(case_a_channel), atol=1e-12)


@pytest.mark.parametrize('t', [-0.1, 1.5, float('nan')])
def test_polarizer_rejects_bad_transmittivity(t):
    with pytest.raises(DomainError):
        PolarizerChannel(0.3, t)


def test_theta_zero_closed_form(case_a_channel, case_b_channel):
    assert case_a_channel.theta_zero() == pytest.approx(-0.5662, abs=1e-4)
    assert math.degrees(case_b_channel.theta_zero()) == pytest.approx(-13.91, abs=0.01)


# ─── PLATES ───────────────────────────────────────────────────

def test_plate_stack_transmittivity():
    assert plates_to_t(PlateStack(0)) == 1.0
    assert plates_to_t(PlateStack(7)) == pytest.approx(0.324, abs=1e-3)
    assert plates_to_t(PlateStack(10)) == pytest.approx(0.200, abs=1e-3)
    assert PlateStack(3).transmittivity == pytest.approx(PER_PLATE_FACTOR ** 3)


def test_plate_stack_channel(case_b_channel):
    assert case_b_channel.alpha_deg == pytest.approx(21.0)
    assert case_b_channel.t == pytest.approx(0.324025, abs=1e-5)


@pytest.mark.parametrize('n, factor', [(-1, 0.85), (2.5, 0.85), (3, 0.0), (3, 1.2)])
def test_plate_stack_validation(n, factor):
    with pytest.raises(DomainError):
        PlateStack(n, factor)


# ─── RANDOM STATES ────────────────────────────────────────────

def test_random_state_is_reproducible():
    assert random_pure_state(42).allclose(random_pure_state(42), atol=0)
    assert not random_pure_state(42).allclose(random_pure_state(43))


@settings(deadline=None, max_examples=200)
@given(seed=st.integers(min_value=0, max_value=2 ** 63))
def test_real_probe_family_structure(seed):
    state = random_pure_state(seed)
    assert np.all(state.amps[:2].imag == 0)
    assert abs(np.imag(state.amps[2] * np.conj(state.amps[3]))) < 1e-15


def test_generator_argument_advances_stream():
    rng = np.random.default_rng(7)
    first, second = random_pure_state(rng), random_pure_state(rng)
    assert not first.allclose(second)
    assert random_pure_state(np.random.default_rng(7)).allclose(first, atol=0)


def test_haar_family_is_normalized():
    state = random_pure_state(5, real_probe=False)
    assert np.linalg.norm(state.amps) == pytest.approx(1.0, abs=1e-12)
    assert np.any(state.amps[:2].imag != 0)


def test_singlet_helper_matches_fixture(singlet):
    assert make_singlet().allclose(singlet, atol=0)
