"""Path sampler, running integral estimates, and the occupation field."""

import math

import numpy as np
import pytest

from perpetua import (
    BandwidthTooSmall,
    CompoundPoisson,
    ConstantJump,
    ExpDecay,
    ExponentialJump,
    Indicator,
    LevyTriplet,
    PreconditionViolation,
    StableLike,
    StepTooCoarse,
    local_time_field,
    perpetual_estimate,
    sample_path,
)

BM_DRIFT = LevyTriplet(1.0, 1.0)


class TestSamplePath:
    def test_pure_drift_is_exact(self):
        path = sample_path(LevyTriplet(2.0), 10.0, 0.01, x0=1.0, seed=1)
        assert np.allclose(path.values, 1.0 + 2.0 * path.times, atol=1e-12)
        assert path.jumps == ()

    def test_grid_shape(self):
        path = sample_path(BM_DRIFT, 5.0, 0.01, seed=2)
        assert path.times[0] == 0.0
        assert path.times[-1] == pytest.approx(5.0)
        assert path.values.shape == path.times.shape
        assert path.dt == pytest.approx(0.01)

    def test_deterministic_in_seed(self):
        a = sample_path(BM_DRIFT, 2.0, 0.01, seed=7)
        b = sample_path(BM_DRIFT, 2.0, 0.01, seed=7)
        c = sample_path(BM_DRIFT, 2.0, 0.01, seed=8)
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_brownian_moments(self):
        n, T = 400, 4.0
        ends = np.array([
            sample_path(BM_DRIFT, T, 0.01, seed=s).values[-1] for s in range(n)
        ])
        assert ends.mean() == pytest.approx(T, abs=5 * math.sqrt(T / n))
        assert ends.var() == pytest.approx(T, rel=0.25)

    def test_compound_poisson_jump_count(self):
        t = LevyTriplet(0.0, 0.0, CompoundPoisson(2.0, ConstantJump(1.0)))
        path = sample_path(t, 50.0, 0.01, seed=3)
        n_jumps = len(path.jumps)
        # Poisson(100): five sigma is +-50
        assert 50 <= n_jumps <= 150
        assert path.values[-1] == pytest.approx(n_jumps)  # unit jumps, no drift

    def test_jump_times_recorded_in_order(self):
        t = LevyTriplet(0.5, 0.0, CompoundPoisson(1.0, ExponentialJump(2.0, 1)))
        path = sample_path(t, 20.0, 0.01, seed=4)
        times = [jt for jt, _ in path.jumps]
        assert times == sorted(times)
        assert all(0.0 <= jt <= 20.0 for jt in times)

    def test_stable_increment_scaling(self):
        # alpha-stable increments over dt scale like dt^(1/alpha)
        t = LevyTriplet(0.0, 0.0, StableLike(1.5, 1.0, 0.0))
        p = sample_path(t, 100.0, 0.01, seed=5)
        steps = np.diff(p.values)
        q_small = np.quantile(np.abs(steps), 0.9)
        p2 = sample_path(t, 100.0, 0.08, seed=6)
        q_big = np.quantile(np.abs(np.diff(p2.values)), 0.9)
        # 8x coarser steps: quantile ratio near 8^(2/3) ~ 4, far from drift's 8
        assert 2.0 < q_big / q_small < 7.0

    def test_dt_precondition(self):
        with pytest.raises(PreconditionViolation) as exc:
            sample_path(BM_DRIFT, 1.0, 0.2, seed=0)
        assert exc.value.reason == "DT_RANGE"

    def test_horizon_precondition(self):
        with pytest.raises(PreconditionViolation):
            sample_path(BM_DRIFT, -1.0, 0.01, seed=0)

    def test_step_too_coarse_for_heavy_cutoff(self):
        t = LevyTriplet(0.0, 0.0, StableLike(0.5, 1.0, 0.0))
        from perpetua.simulate import StepEngine
        with pytest.raises(StepTooCoarse):
            # cutoff so small the expected jumps per step blow past the budget
            StepEngine(t, 0.5, cutoff=1e-6)


class TestPerpetualEstimate:
    def test_constant_function_gives_time(self):
        path = sample_path(BM_DRIFT, 8.0, 0.01, seed=10)
        est = perpetual_estimate(path, Indicator(-1e9, 1e9), [2.0, 4.0, 8.0])
        assert np.allclose(est, [2.0, 4.0, 8.0], rtol=1e-9)

    def test_pure_drift_closed_form(self):
        # f(x) = e^{-x} along x = t: integral is 1 - e^{-T}
        path = sample_path(LevyTriplet(1.0), 20.0, 0.005, seed=11)
        est = perpetual_estimate(path, ExpDecay(1.0, left_level=0.0), [1.0, 5.0, 20.0])
        expected = 1.0 - np.exp(-np.array([1.0, 5.0, 20.0]))
        assert np.allclose(est, expected, atol=1e-4)

    def test_monotone_in_checkpoints(self):
        path = sample_path(BM_DRIFT, 16.0, 0.01, seed=12)
        est = perpetual_estimate(path, ExpDecay(1.0), [1.0, 2.0, 4.0, 8.0, 16.0])
        assert np.all(np.diff(est) >= -1e-12)

    def test_checkpoint_range_guard(self):
        path = sample_path(BM_DRIFT, 4.0, 0.01, seed=13)
        with pytest.raises(PreconditionViolation):
            perpetual_estimate(path, ExpDecay(1.0), [5.0])


class TestLocalTimeField:
    def test_occupation_identity_single_path(self):
        path = sample_path(BM_DRIFT, 50.0, 0.01, seed=20)
        lo = path.values.min() - 0.1
        hi = path.values.max() + 0.1
        grid = np.linspace(lo, hi, 1200)
        fld = local_time_field(path, grid, 0.05)
        mass = float(np.trapezoid(fld.values, grid))
        assert mass == pytest.approx(fld.t_covered, rel=0.03)

    def test_grid_larger_than_path_covers_everything(self):
        path = sample_path(BM_DRIFT, 20.0, 0.01, seed=21)
        grid = np.linspace(path.values.min() - 1, path.values.max() + 1, 800)
        fld = local_time_field(path, grid, 0.05)
        assert fld.t_covered == pytest.approx(20.0, rel=1e-6)

    def test_pure_drift_flat_density(self):
        # x = t: occupation density against dx is 1/speed
        path = sample_path(LevyTriplet(2.0), 10.0, 0.01, seed=22)
        grid = np.linspace(2.0, 18.0, 33)
        fld = local_time_field(path, grid, 0.25)
        assert np.allclose(fld.values, 0.5, atol=1e-9)

    def test_bandwidth_floor(self):
        path = sample_path(BM_DRIFT, 5.0, 0.01, seed=23)
        with pytest.raises(BandwidthTooSmall):
            local_time_field(path, np.linspace(-1, 5, 50), 1e-5)

    def test_grid_order_guard(self):
        path = sample_path(BM_DRIFT, 5.0, 0.01, seed=24)
        with pytest.raises(PreconditionViolation):
            local_time_field(path, np.array([1.0, 1.0, 2.0]), 0.05)
