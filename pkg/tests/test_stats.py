"""KS distances, including the one-sided limits needed at atoms."""

import math

import numpy as np
import pytest

from perpetua import ks_critical, ks_one_sample, ks_two_sample


class TestTwoSample:
    def test_identical_samples(self):
        a = np.array([1.0, 2.0, 3.0])
        assert ks_two_sample(a, a) == 0.0

    def test_disjoint_samples(self):
        assert ks_two_sample([0.0, 1.0], [5.0, 6.0]) == 1.0

    def test_known_small_case(self):
        # F_a jumps 1/2 at 0 and 2; F_b jumps 1/2 at 1 and 2: gap 1/2 on [0,1)
        assert ks_two_sample([0.0, 2.0], [1.0, 2.0]) == pytest.approx(0.5)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        a, b = rng.normal(size=40), rng.normal(0.3, size=60)
        assert ks_two_sample(a, b) == pytest.approx(ks_two_sample(b, a))

    def test_shift_detected(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=500)
        b = rng.normal(2.0, size=500)
        assert ks_two_sample(a, b) > 0.5


class TestOneSample:
    def test_exact_uniform_grid(self):
        # midpoints of 1/n cells: ECDF straddles F evenly, sup gap = 1/(2n)
        n = 10
        x = (np.arange(n) + 0.5) / n
        stat = ks_one_sample(x, lambda v: np.clip(v, 0.0, 1.0))
        assert stat == pytest.approx(0.05)

    def test_atom_handled_with_left_limit(self):
        # model: atom of mass 1/2 at zero plus Uniform(0,1)/2; a sample of
        # all zeros sits exactly on the atom, gap 1/2 only if the left limit
        # is ignored
        samples = np.zeros(4)

        def cdf(x):
            x = np.asarray(x, dtype=float)
            return np.where(x < 0.0, 0.0, 0.5 + 0.5 * np.clip(x, 0.0, 1.0))

        def cdf_left(x):
            x = np.asarray(x, dtype=float)
            return np.where(x <= 0.0, 0.0, 0.5 + 0.5 * np.clip(x, 0.0, 1.0))

        stat = ks_one_sample(samples, cdf, cdf_left=cdf_left)
        assert stat == pytest.approx(0.5)
        # without the left limit the ECDF looks like a perfect match at 0+
        # from the right but misses the mass approaching from the left
        assert ks_one_sample(samples, cdf) == pytest.approx(0.5)

    def test_ties_share_one_jump(self):
        # four samples at the same point: ECDF jumps straight to 1 there
        samples = np.full(4, 0.3)
        stat = ks_one_sample(samples, lambda v: np.clip(v, 0.0, 1.0))
        assert stat == pytest.approx(0.7)

    def test_large_sample_converges(self):
        rng = np.random.default_rng(2)
        x = rng.uniform(size=20000)
        stat = ks_one_sample(x, lambda v: np.clip(v, 0.0, 1.0))
        assert stat < ks_critical(20000, alpha=0.01)


class TestCriticalValues:
    def test_one_sample_alpha_05(self):
        # c(0.05) = 1.3581, the classical table value
        assert ks_critical(100, alpha=0.05) == pytest.approx(1.3581 / 10.0, rel=1e-3)

    def test_one_sample_alpha_01(self):
        assert ks_critical(400, alpha=0.01) == pytest.approx(1.6276 / 20.0, rel=1e-3)

    def test_two_sample_reduces_to_scaled_one_sample(self):
        n = 250
        assert ks_critical(n, n) == pytest.approx(ks_critical(n) * math.sqrt(2.0))

    def test_monotone_in_n_and_alpha(self):
        assert ks_critical(100) > ks_critical(1000)
        assert ks_critical(100, alpha=0.01) > ks_critical(100, alpha=0.10)
