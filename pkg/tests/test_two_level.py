"""Two-level dynamics: coherent rotation, measured hopping, Zeno limit."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenomap import (
    InvalidStateError,
    ProbabilityPair,
    RabiParams,
    TwoLevelState,
    coherent_evolve,
    coherent_step,
    measured_evolve_closed,
    measured_probability_step,
    monte_carlo_measured_evolve,
    zeno_survival,
)

GROUND = TwoLevelState(1.0 + 0j, 0j)


class TestCoherentStep:
    def test_half_pulse_transfers_fully(self):
        out = coherent_step(GROUND, math.pi / 2)
        assert abs(out.a1) < 1e-12
        assert abs(out.a2 - 1j) < 1e-12

    def test_zero_angle_is_identity(self):
        out = coherent_step(GROUND, 0.0)
        assert out == GROUND

    def test_two_quarter_pulses_transfer_fully(self):
        out = coherent_step(coherent_step(GROUND, math.pi / 4), math.pi / 4)
        assert abs(out.a2) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_norm_preserved(self):
        state = TwoLevelState(0.6 + 0j, 0.8j)
        out = coherent_step(state, 0.7)
        assert out.norm_sq() == pytest.approx(1.0, abs=1e-12)

    def test_rejects_unnormalized_state(self):
        with pytest.raises(InvalidStateError):
            coherent_step(TwoLevelState(0.5 + 0j, 0j), 0.3)


class TestCoherentEvolve:
    def test_quarter_angle_four_times(self):
        out = coherent_evolve(GROUND, math.pi / 8, 4)
        assert abs(out.a1) < 1e-12
        assert abs(out.a2 - 1j) < 1e-12

    def test_n_zero_is_identity(self):
        assert coherent_evolve(GROUND, 1.234, 0) == GROUND

    def test_matches_repeated_steps(self):
        # oracle: explicit repeated application of the one-segment rotation
        closed = coherent_evolve(GROUND, math.pi / 6, 2)
        iterated = coherent_step(coherent_step(GROUND, math.pi / 6), math.pi / 6)
        assert abs(closed.a1 - iterated.a1) < 1e-12
        assert abs(closed.a2 - iterated.a2) < 1e-12

    def test_rejects_negative_n(self):
        with pytest.raises(ValueError):
            coherent_evolve(GROUND, 0.1, -1)

    @given(
        phi=st.floats(-2 * math.pi, 2 * math.pi),
        n=st.integers(min_value=0, max_value=200),
    )
    @settings(max_examples=60)
    def test_closed_form_tracks_iteration(self, phi, n):
        state = GROUND
        for _ in range(n):
            state = coherent_step(state, phi)
        closed = coherent_evolve(GROUND, phi, n)
        assert abs(closed.a1 - state.a1) < 1e-10
        assert abs(closed.a2 - state.a2) < 1e-10

    @given(
        phi=st.floats(-2 * math.pi, 2 * math.pi),
        n=st.integers(min_value=0, max_value=10_000),
    )
    @settings(max_examples=40)
    def test_propagator_power_is_unitary(self, phi, n):
        angle = n * phi
        u = np.array(
            [
                [math.cos(angle), 1j * math.sin(angle)],
                [1j * math.sin(angle), math.cos(angle)],
            ]
        )
        assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)


class TestMeasuredStep:
    def test_quarter_angle_equalizes(self):
        out = measured_probability_step(ProbabilityPair(1.0, 0.0), math.pi / 4)
        assert out.p1 == pytest.approx(0.5, abs=1e-12)
        assert out.p2 == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("phi", [0.0, 0.2, math.pi / 3, 1.9, math.pi])
    def test_uniform_is_fixed_point(self, phi):
        out = measured_probability_step(ProbabilityPair(0.5, 0.5), phi)
        assert out.p1 == pytest.approx(0.5, abs=1e-12)
        assert out.p2 == pytest.approx(0.5, abs=1e-12)

    def test_eighth_angle_weights(self):
        out = measured_probability_step(ProbabilityPair(1.0, 0.0), math.pi / 8)
        assert out.p1 == pytest.approx(math.cos(math.pi / 8) ** 2, abs=1e-14)
        assert out.p2 == pytest.approx(math.sin(math.pi / 8) ** 2, abs=1e-14)
        assert out.p1 == pytest.approx(0.85355, abs=1e-5)
        assert out.p2 == pytest.approx(0.14645, abs=1e-5)

    def test_output_sums_to_one(self):
        out = measured_probability_step(ProbabilityPair(0.3, 0.7), 1.1)
        assert out.p1 + out.p2 == pytest.approx(1.0, abs=1e-12)


class TestMeasuredEvolveClosed:
    def test_single_equalizing_segment(self):
        # 2 phi = pi / 2
        out = measured_evolve_closed(ProbabilityPair(1.0, 0.0), math.pi / 4, 1)
        assert out.p1 == pytest.approx(0.5, abs=1e-12)

    def test_four_segments_at_eighth_angle(self):
        # 2 phi = pi / 4, cos^4 = 1/4
        out = measured_evolve_closed(ProbabilityPair(1.0, 0.0), math.pi / 8, 4)
        assert out.p1 == pytest.approx(0.625, abs=1e-12)
        assert out.p2 == pytest.approx(0.375, abs=1e-12)

    def test_n_zero_is_identity(self):
        start = ProbabilityPair(1.0, 0.0)
        assert measured_evolve_closed(start, 0.77, 0) == start

    @pytest.mark.parametrize("phi", [math.pi / 8, 0.3, 1.1])
    def test_matches_iteration_at_ten_thousand_steps(self, phi):
        p = ProbabilityPair(1.0, 0.0)
        for _ in range(10_000):
            p = measured_probability_step(p, phi)
        closed = measured_evolve_closed(ProbabilityPair(1.0, 0.0), phi, 10_000)
        assert abs(closed.p1 - p.p1) < 1e-12
        assert abs(closed.p2 - p.p2) < 1e-12

    def test_near_degenerate_angle_stays_close(self):
        # At tiny angles the iterated map accumulates roundoff linearly and
        # can exceed the 1e-12 agreement seen elsewhere; measured ~2e-12.
        phi = math.pi / 2000
        p = ProbabilityPair(1.0, 0.0)
        for _ in range(10_000):
            p = measured_probability_step(p, phi)
        closed = measured_evolve_closed(ProbabilityPair(1.0, 0.0), phi, 10_000)
        assert abs(closed.p1 - p.p1) < 5e-12

    @given(
        phi=st.floats(0.02, math.pi / 2 - 0.02),
        n=st.integers(min_value=0, max_value=2000),
        p1=st.floats(0.0, 1.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_closed_form_tracks_iteration(self, phi, n, p1):
        start = ProbabilityPair(p1, 1.0 - p1)
        p = start
        for _ in range(n):
            p = measured_probability_step(p, phi)
        closed = measured_evolve_closed(start, phi, n)
        assert abs(closed.p1 - p.p1) < 1e-12

    @given(phi=st.floats(-10.0, 10.0))
    @settings(max_examples=60)
    def test_step_matrix_is_symmetric_doubly_stochastic(self, phi):
        c2 = math.cos(phi) ** 2
        s2 = math.sin(phi) ** 2
        m = np.array([[c2, s2], [s2, c2]])
        assert np.all(m >= 0)
        assert np.allclose(m, m.T)
        assert np.allclose(m.sum(axis=0), 1.0, atol=1e-12)
        assert np.allclose(m.sum(axis=1), 1.0, atol=1e-12)


class TestZenoSurvival:
    def test_uninterrupted_pulse_transfers(self):
        out = zeno_survival(1)
        assert out.p1 == pytest.approx(0.0, abs=1e-12)
        assert out.p2 == pytest.approx(1.0, abs=1e-12)

    def test_two_segments_equalize(self):
        out = zeno_survival(2)
        assert out.p1 == pytest.approx(0.5, abs=1e-12)

    def test_large_n_matches_leading_order(self):
        out = zeno_survival(64)
        leading = math.pi**2 / (4 * 64)
        assert abs(out.p2 - leading) / leading < 0.15

    def test_rejects_n_zero(self):
        with pytest.raises(ValueError):
            zeno_survival(0)

    def test_survival_probability_is_nondecreasing(self):
        values = [zeno_survival(n).p1 for n in range(2, 400)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("n", [50, 64, 128, 256, 1000, 2000])
    def test_survival_exceeds_leading_order_bound(self, n):
        assert zeno_survival(n).p1 > 1.0 - math.pi**2 / (4 * n) - 0.01


class TestMonteCarlo:
    def test_matches_closed_form_within_three_sigma(self):
        n, trials = 16, 100_000
        phi = math.pi / 32  # 2 phi = pi / 16
        closed = measured_evolve_closed(ProbabilityPair(1.0, 0.0), phi, n)
        mc = monte_carlo_measured_evolve(ProbabilityPair(1.0, 0.0), phi, n, trials, seed=2024)
        se = math.sqrt(closed.p2 * (1 - closed.p2) / trials)
        assert abs(mc.p2 - closed.p2) < 3 * se

    def test_equalizing_angle_converges_to_half(self):
        # 2 phi = pi / 2 kills the contrast in a single measured segment
        mc = monte_carlo_measured_evolve(ProbabilityPair(1.0, 0.0), math.pi / 4, 2, 40_000, seed=5)
        assert mc.p1 == pytest.approx(0.5, abs=0.01)

    def test_single_trial_is_deterministic(self):
        a = monte_carlo_measured_evolve(ProbabilityPair(1.0, 0.0), 0.3, 8, 1, seed=42)
        b = monte_carlo_measured_evolve(ProbabilityPair(1.0, 0.0), 0.3, 8, 1, seed=42)
        assert a == b

    def test_zero_trials_rejected(self):
        with pytest.raises(ValueError):
            monte_carlo_measured_evolve(ProbabilityPair(1.0, 0.0), 0.3, 8, 0, seed=1)

    def test_matches_explicit_amplitude_simulation(self):
        # oracle: evolve complex amplitudes with freshly drawn phases before
        # every segment, consuming the random stream in the same layout
        n, trials, phi, seed = 12, 400, math.pi / 10, 31
        rng = np.random.default_rng(seed)
        a1 = np.full(trials, 1.0 + 0j)
        a2 = np.zeros(trials, complex)
        c, s = math.cos(phi), math.sin(phi)
        for _ in range(n):
            alpha1 = rng.uniform(0, 2 * math.pi, trials)
            alpha2 = rng.uniform(0, 2 * math.pi, trials)
            a1 = np.abs(a1) * np.exp(1j * alpha1)
            a2 = np.abs(a2) * np.exp(1j * alpha2)
            a1, a2 = c * a1 + 1j * s * a2, 1j * s * a1 + c * a2
        w1, w2 = np.abs(a1) ** 2, np.abs(a2) ** 2
        oracle = ProbabilityPair(
            float(np.mean(w1 / (w1 + w2))), float(np.mean(w2 / (w1 + w2)))
        )
        mc = monte_carlo_measured_evolve(ProbabilityPair(1.0, 0.0), phi, n, trials, seed)
        assert mc.p1 == pytest.approx(oracle.p1, abs=1e-12)
        assert mc.p2 == pytest.approx(oracle.p2, abs=1e-12)


def test_phase_difference_interference_averages_out():
    # the mechanism that removes the cross term from the measured step
    rng = np.random.default_rng(20240810)
    alpha1 = rng.uniform(0, 2 * math.pi, 100_000)
    alpha2 = rng.uniform(0, 2 * math.pi, 100_000)
    assert abs(np.mean(np.sin(alpha1 - alpha2))) < 0.01


class TestTypes:
    def test_rabi_params_phi(self):
        params = RabiParams(omega=math.pi, tau=0.5)
        assert params.phi == pytest.approx(math.pi / 4)

    def test_rabi_params_rejects_bad_tau(self):
        with pytest.raises(ValueError):
            RabiParams(omega=1.0, tau=0.0)

    def test_probability_pair_must_sum_to_one(self):
        with pytest.raises(ValueError):
            ProbabilityPair(0.7, 0.7)

    def test_probability_pair_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            ProbabilityPair(1.4, -0.4)

    def test_state_probabilities(self):
        probs = TwoLevelState(0.6 + 0j, 0.8j).probabilities()
        assert probs.p1 == pytest.approx(0.36, abs=1e-12)
        assert probs.p2 == pytest.approx(0.64, abs=1e-12)
