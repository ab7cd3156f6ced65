"""Volumes and coordinate moments of B_p^n."""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpheat.errors import DomainError
from lpheat.lp_model import (BallParams, ball_volume, coordinate_density, coordinate_moment,
                             density_normalizer, moment_set, p1_mixed_fourth, p1_variance,
                             projection_fourth_moment)
from lpheat.sampler import sample_uniform_ball
from lpheat.scalar_math import RngStream, integrate_adaptive

ps = st.floats(min_value=1.0, max_value=2.0)
ns = st.integers(min_value=1, max_value=60)


class TestBallParams:
    @pytest.mark.parametrize("p, n", [(0.9, 2), (2.1, 2), (1.5, 0), (1.5, 2.5)])
    def test_domain(self, p, n):
        with pytest.raises(DomainError):
            BallParams(p, n)

    def test_require_subcritical(self):
        BallParams(1.9, 3).require_subcritical()
        with pytest.raises(DomainError):
            BallParams(2.0, 3).require_subcritical()

    def test_alpha(self):
        assert BallParams(1.25, 2).alpha == 0.8


class TestVolume:
    @pytest.mark.parametrize("p, n, expected", [(1, 2, 2.0), (2, 2, math.pi), (1, 1, 2.0)])
    def test_examples(self, p, n, expected):
        assert ball_volume(BallParams(p, n)) == pytest.approx(expected, rel=1e-13)

    def test_unit_sphere_volume(self):
        assert ball_volume(BallParams(2, 3)) == pytest.approx(4 * math.pi / 3, rel=1e-13)


class TestCoordinateMoment:
    @given(ps, ns)
    def test_total_mass(self, p, n):
        assert coordinate_moment(BallParams(p, n), 0.0) == pytest.approx(1.0, rel=1e-12)

    def test_examples(self):
        assert coordinate_moment(BallParams(1, 2), 2.0) == pytest.approx(1 / 6, rel=1e-13)
        assert coordinate_moment(BallParams(1, 4), 4.0) == pytest.approx(1 / 70, rel=1e-13)

    def test_rejects_r_below_minus_one(self):
        with pytest.raises(DomainError):
            coordinate_moment(BallParams(1.5, 2), -1.0)

    @given(ps, st.integers(min_value=1, max_value=20))
    def test_log_convex_in_r(self, p, n):
        params = BallParams(p, n)
        grid = np.linspace(-0.9, 5.9, 18)
        logs = np.log([coordinate_moment(params, r) for r in grid])
        assert np.all(logs[1:-1] <= 0.5 * (logs[:-2] + logs[2:]) + 1e-12)

    @pytest.mark.parametrize("p, n", [(1.0, 3), (1.5, 4), (1.8, 2)])
    def test_matches_density_quadrature(self, p, n):
        params = BallParams(p, n)
        val, _ = integrate_adaptive(lambda u: 2 * u * u * coordinate_density(params, u), 0.0, 1.0)
        assert val == pytest.approx(coordinate_moment(params, 2.0), rel=1e-9)


class TestCrossPolytope:
    @pytest.mark.parametrize("n", range(2, 51))
    def test_moments_match_rationals(self, n):
        ms = moment_set(BallParams(1, n))
        v = Fraction(2, (n + 1) * (n + 2))
        m4 = Fraction(24, (n + 1) * (n + 2) * (n + 3) * (n + 4))
        assert abs(ms.v / float(v) - 1) <= 1e-12
        assert abs(ms.m4 / float(m4) - 1) <= 1e-12
        assert p1_variance(n) == v

    @pytest.mark.parametrize("n", range(2, 51))
    def test_delta_sign_rule(self, n):
        delta = moment_set(BallParams(1, n)).delta
        assert np.sign(delta) == np.sign(n * n - n - 8)

    def test_p1_mixed_fourth(self):
        assert p1_mixed_fourth(2) == (Fraction(1, 15), Fraction(1, 90))
        assert p1_mixed_fourth(4) == (Fraction(1, 70), Fraction(1, 420))

    @given(st.integers(min_value=2, max_value=200))
    def test_mixed_gap(self, n):
        m4, m22 = p1_mixed_fourth(n)
        assert m4 - 3 * m22 == Fraction(12, (n + 1) * (n + 2) * (n + 3) * (n + 4))

    def test_moment_set_n4(self):
        ms = moment_set(BallParams(1, 4))
        assert ms.v == pytest.approx(1 / 15, rel=1e-13)
        assert ms.m4 == pytest.approx(1 / 70, rel=1e-13)
        assert ms.delta == pytest.approx(1 / 1050, rel=1e-10)

    def test_delta_n3_negative(self):
        assert moment_set(BallParams(1, 3)).delta < 0

    def test_projection_fourth_moment_monte_carlo(self):
        params = BallParams(1, 4)
        theta = np.array([0.7, 0.5, 0.5, 0.1])
        theta /= np.linalg.norm(theta)
        m4, m22 = p1_mixed_fourth(4)
        exact = float(3 * m22 + (m4 - 3 * m22) * float(np.sum(theta**4)))
        assert projection_fourth_moment(params, theta) == pytest.approx(exact, rel=1e-12)
        x = sample_uniform_ball(params, RngStream(3), 400_000)
        z4 = (x @ theta) ** 4
        assert abs(z4.mean() - exact) < 5 * z4.std() / math.sqrt(z4.size)


class TestGaussianLimit:
    def test_kurtosis_tends_to_three(self):
        r = [moment_set(BallParams(2, n)).big_r for n in (10, 100, 1000, 10_000)]
        assert np.all(np.diff(r) > 0)
        assert abs(r[-1] - 3.0) < 1e-3


class TestDensity:
    def test_origin(self):
        params = BallParams(1.3, 5)
        assert coordinate_density(params, 0.0) == density_normalizer(params)

    def test_boundary(self):
        assert coordinate_density(BallParams(1.5, 3), 1.0) == 0.0

    def test_diamond(self):
        assert coordinate_density(BallParams(1, 2), 0.5) == pytest.approx(0.5, rel=1e-13)

    @given(ps, st.integers(min_value=1, max_value=30))
    def test_normalized(self, p, n):
        params = BallParams(p, n)
        val, _ = integrate_adaptive(lambda u: coordinate_density(params, u), 0.0, 1.0)
        assert 2 * val == pytest.approx(1.0, rel=1e-8)
