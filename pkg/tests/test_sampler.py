"""Uniform sampling on B_p^n and generalized Gaussian draws."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpheat.errors import DomainError, UsageError
from lpheat.lp_model import BallParams, coordinate_moment
from lpheat.sampler import (gen_gaussian_density_at_zero, iter_ball_batches, sample_ball_any_p,
                            sample_dirichlet, sample_gen_gaussian, sample_uniform_ball)
from lpheat.scalar_math import RngStream


def within(sample, target, k=4.0):
    sample = np.asarray(sample, dtype=float)
    return abs(sample.mean() - target) < k * sample.std(ddof=1) / math.sqrt(sample.size)


class TestDirichlet:
    def test_beta_one_one(self):
        d = sample_dirichlet([1, 1], RngStream(1), 200_000)
        assert within(d[:, 0], 0.5)

    def test_mean(self):
        d = sample_dirichlet([1, 0.5, 0.5], RngStream(2), 200_000)
        assert within(d[:, 1], 0.25)

    @given(st.lists(st.floats(min_value=0.05, max_value=5), min_size=1, max_size=6),
           st.integers(min_value=0, max_value=2**32))
    def test_sums_to_one(self, shapes, seed):
        d = sample_dirichlet(shapes, RngStream(seed), 50)
        np.testing.assert_allclose(d.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(d >= 0)

    def test_single_draw_shape(self):
        assert sample_dirichlet([1, 2], RngStream(0)).shape == (2,)

    @pytest.mark.parametrize("shapes", [[], [1, 0], [1, -1]])
    def test_invalid(self, shapes):
        with pytest.raises(DomainError):
            sample_dirichlet(shapes, RngStream(0), 3)


class TestUniformBall:
    def test_interval(self):
        x = sample_uniform_ball(BallParams(1, 1), RngStream(5), 200_000)
        assert within(x[:, 0] ** 2, 1 / 3)

    def test_second_moment(self):
        params = BallParams(1.5, 3)
        x = sample_uniform_ball(params, RngStream(6), 200_000)
        assert within(x[:, 0] ** 2, coordinate_moment(params, 2.0))

    @given(st.floats(min_value=1.0, max_value=2.0), st.integers(min_value=1, max_value=8),
           st.integers(min_value=0, max_value=2**32))
    def test_inside_ball(self, p, n, seed):
        x = sample_uniform_ball(BallParams(p, n), RngStream(seed), 200)
        assert np.all((np.abs(x) ** p).sum(axis=1) <= 1.0 + 1e-12)

    @pytest.mark.parametrize("p", [1.0, 1.25, 1.5, 1.75])
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_absolute_moments(self, p, n):
        params = BallParams(p, n)
        x = sample_uniform_ball(params, RngStream(int(100 * p) + n), 10**6)
        a = np.abs(x[:, 0])
        for r in (1.0, 2.0, 4.0):
            assert within(a**r, coordinate_moment(params, r))

    def test_covariance_diagonal(self):
        params = BallParams(1.4, 3)
        x = sample_uniform_ball(params, RngStream(9), 400_000)
        v = coordinate_moment(params, 2.0)
        for i in range(3):
            assert within(x[:, i] ** 2, v)
            for j in range(i + 1, 3):
                assert within(x[:, i] * x[:, j], 0.0)

    def test_dirichlet_masses(self):
        p, n = 1.6, 3
        x = sample_uniform_ball(BallParams(p, n), RngStream(10), 300_000)
        masses = np.abs(x) ** p
        alpha = 1 / p
        total = n * alpha + 1
        for i in range(n):
            assert within(masses[:, i], alpha / total)
        assert within(1 - masses.sum(axis=1), 1 / total)

    def test_reproducible(self):
        a = sample_uniform_ball(BallParams(1.5, 4), RngStream(3, 1), 100)
        b = sample_uniform_ball(BallParams(1.5, 4), RngStream(3, 1), 100)
        np.testing.assert_array_equal(a, b)

    def test_any_p_beyond_two(self):
        x = sample_ball_any_p(3.0, 2, RngStream(1), 1000)
        assert np.all((np.abs(x) ** 3).sum(axis=1) <= 1 + 1e-12)


class TestBatches:
    def test_budget_respected(self):
        sizes = [b.shape[0] for b in iter_ball_batches(1.5, 3, RngStream(0), 1000, batch=300)]
        assert sizes == [300, 300, 300, 100]

    def test_batch_blocks_are_independent_of_order(self):
        batches = list(iter_ball_batches(1.5, 3, RngStream(0), 600, batch=300))
        again = list(iter_ball_batches(1.5, 3, RngStream(0), 300, batch=300))
        np.testing.assert_array_equal(batches[0], again[0])

    def test_invalid(self):
        with pytest.raises(UsageError):
            list(iter_ball_batches(1.5, 3, RngStream(0), 0))
        with pytest.raises(TypeError):
            list(iter_ball_batches(1.5, 3, 7, 10))


class TestGenGaussian:
    def test_laplace_mean_abs(self):
        z = sample_gen_gaussian(1.0, RngStream(1), 200_000)
        assert within(np.abs(z), 1.0)

    def test_gaussian_second_moment(self):
        z = sample_gen_gaussian(2.0, RngStream(2), 200_000)
        assert within(z**2, 0.5)

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0])
    def test_density_at_zero(self, p):
        z = sample_gen_gaussian(p, RngStream(3), 10**6)
        h = 0.02
        hits = (np.abs(z) < h).astype(float) / (2 * h)
        # the box kernel has O(h^2) bias for smooth densities, O(h) at the p = 1 cusp
        target = gen_gaussian_density_at_zero(p)
        assert abs(hits.mean() - target) < 4 * hits.std() / math.sqrt(z.size) + target * h

    def test_scalar_draw(self):
        assert isinstance(sample_gen_gaussian(1.5, RngStream(0)), float)
