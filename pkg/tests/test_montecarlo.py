import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ionheat.analytics import MomentPair, fidelity_from_moments, mode_moments_exponential, moments_exponential
from ionheat.chain import build_chain
from ionheat.montecarlo import (
    Ensemble,
    GridMismatchError,
    ensemble_fidelity,
    ensemble_moments,
    fine_grid,
    propagate_chain,
    propagate_single,
    sample_amplitudes,
)
from ionheat.noise import NoisePath, SeedSpec, correlated_paths, ou_path


def _trapezoid_oracle(a, tau, dt, t):
    """Exact moments of the trapezoid amplitude on the grid k*dt (a Gaussian linear form)."""
    K = int(round(t / dt)) + 1
    s = dt * np.arange(K)
    w = np.full(K, dt)
    w[[0, -1]] *= 0.5
    w = w * np.exp(1j * s) * math.sqrt((1 + a * a) / (a * tau) / 2)
    C = np.exp(-np.abs(s[:, None] - s[None, :]) / a)
    return MomentPair(float(np.real(w @ C @ w.conj())), complex(w @ C @ w))


class TestDeterministicFields:
    def test_zero_field(self):
        amp = propagate_single(ou_path(1.0, 0.02, 100, variance=0.0), 0.8)
        assert np.array_equal(amp.v, np.zeros((1, 100), complex))

    @pytest.mark.parametrize("dt, bound", [(0.02, None), (1e-3, 1e-6)])
    def test_constant_field(self, dt, bound):
        g = 1.0
        K = int(round(10.0 / dt)) + 1
        amp = propagate_single(NoisePath(dt, np.ones((1, K))), g)
        s = amp.times
        exact = g * (np.exp(1j * s) - 1) / 1j
        # each trapezoid panel of exp(is) carries the factor (h/2) cot(h/2)
        factor = (dt / 2) / math.tan(dt / 2)
        assert amp.v[0] == pytest.approx(factor * exact, rel=1e-11, abs=1e-13)
        err = np.abs(amp.v[0] - exact).max()
        assert err <= 1.01 * g * dt**2 / 6
        if bound is not None:
            assert err <= bound

    def test_resonant_field_grows_linearly(self):
        dt, g = 0.02, 0.3
        K = int(round(50 / dt)) + 1
        s = dt * np.arange(K)
        amp = propagate_single(NoisePath(dt, np.cos(s)[None, :]), g)
        assert abs(amp.v[0, -1]) == pytest.approx(g * 50 / 2, rel=0.02)

    def test_single_ion_chain_equals_single(self):
        path = ou_path(1.0, 0.02, 300, SeedSpec(5))
        a = propagate_single(path, 0.4).v
        b = propagate_chain(path, build_chain(1), 0.4).v
        assert np.array_equal(a, b)

    def test_coherent_field_only_drives_com(self):
        chain = build_chain(3)
        path = correlated_paths(np.ones((3, 3)), 1.0, 0.02, 1001, SeedSpec(2))
        v = propagate_chain(path, chain, 0.5).v
        assert np.abs(v[1:]).max() <= 1e-12
        assert np.abs(v[0]).max() > 0.1


class TestGrids:
    def test_rows_must_match_chain(self):
        with pytest.raises(GridMismatchError, match="3 ions"):
            propagate_chain(ou_path(1.0, 0.02, 10), build_chain(3), 1.0)

    def test_explicit_times_must_match(self):
        path = ou_path(1.0, 0.02, 10)
        with pytest.raises(GridMismatchError):
            propagate_single(path, 1.0, times=np.linspace(0, 1, 10))
        assert propagate_single(path, 1.0, times=0.02 * np.arange(10)).times.size == 10

    def test_fine_grid_on_multiples(self):
        dt, K, idx = fine_grid(0.5 * np.arange(1, 41), 0.02)
        assert dt == 0.02 and K == 1001 and idx[0] == 25

    def test_fine_grid_refines_off_multiples(self):
        dt, K, idx = fine_grid(np.linspace(0, 25, 500), 0.02)
        assert dt <= 0.02
        assert np.allclose(dt * idx, np.linspace(0, 25, 500), atol=1e-9)

    @pytest.mark.parametrize("times", [[], [1.0, 0.5], [-1.0, 1.0], [0.013, 0.5, 2.0]])
    def test_fine_grid_rejects(self, times):
        with pytest.raises(GridMismatchError):
            fine_grid(times, 0.02)


class TestEnsembles:
    times = 0.5 * np.arange(1, 21)

    def test_independent_of_worker_count(self):
        ens = Ensemble(1.0, 8.5)
        a = sample_amplitudes(ens, self.times, 600, seed=3, workers=1)
        b = sample_amplitudes(ens, self.times, 600, seed=3, workers=4)
        assert np.array_equal(a, b)

    def test_prefix_property(self):
        ens = Ensemble(1.0, 8.5)
        a = sample_amplitudes(ens, self.times, 300, seed=3)
        b = sample_amplitudes(ens, self.times, 700, seed=3)
        assert np.array_equal(a, b[:300])

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2**32))
    def test_moment_inequality_holds_for_every_seed(self, seed):
        est = ensemble_moments(Ensemble(1.0, 8.5), self.times, 20, seed=seed)
        assert np.all(np.abs(est.mean["vv"]) <= est.mean["nbar"] * (1 + 1e-12))

    def test_standard_error_scales_as_inverse_root_R(self):
        ens = Ensemble(1.0, 8.5)
        small = ensemble_fidelity(ens, self.times, 1000, seed=1).stderr["fidelity"]
        big = ensemble_fidelity(ens, self.times, 4000, seed=1).stderr["fidelity"]
        assert np.median(big / small) == pytest.approx(0.5, rel=0.1)

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_matches_discrete_oracle(self, seed):
        a, tau = 1.0, 8.5
        est = ensemble_fidelity(Ensemble(a, tau), self.times, 3000, seed=seed)
        ref = np.array([fidelity_from_moments(_trapezoid_oracle(a, tau, 0.02, t)) for t in self.times])
        z = np.abs(est.mean["fidelity"] - ref) / est.stderr["fidelity"]
        assert z.max() <= 4.5

    def test_integration_bias_is_far_below_sampling_error(self):
        a, tau, t = 1.0, 8.5, 10.0
        est = ensemble_fidelity(Ensemble(a, tau), [t], 10_000, seed=42)
        se = est.stderr["fidelity"][0]
        F = fidelity_from_moments(moments_exponential(a, tau, t))
        coarse = fidelity_from_moments(_trapezoid_oracle(a, tau, 0.02, t))
        fine = fidelity_from_moments(_trapezoid_oracle(a, tau, 0.01, t))
        assert abs(coarse - F) < 0.2 * se
        assert abs(coarse - fine) < 0.2 * se

    def test_incoherent_two_ion_modes_follow_exact_mode_moments(self):
        chain = build_chain(2)
        est = ensemble_moments(Ensemble(1.0, 8.5, chain=chain, gamma=np.eye(2)), self.times, 4000, seed=7)
        for p in range(2):
            ref = mode_moments_exponential(1.0, 8.5, chain.eigenvalues[p], 1.0, self.times)
            z = np.abs(est.mean["nbar"][p] - ref.m) / est.stderr["nbar"][p]
            assert z.max() <= 4.5

    def test_estimate_shapes_and_metadata(self):
        est = ensemble_moments(Ensemble(1.0, 8.5, chain=build_chain(3)), self.times, 10, seed=9)
        assert est.mean["nbar"].shape == (3, 20) and est.R == 10 and est.seed == 9
        assert "fidelity" not in est.mean

    def test_invalid_R(self):
        with pytest.raises(ValueError):
            sample_amplitudes(Ensemble(1.0, 8.5), self.times, 0)
