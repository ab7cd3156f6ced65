"""Exact rational certificates: polynomials, Bernstein lists, two-interval masses."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpheat.appendix.base_case import two_interval_check
from lpheat.appendix.polynomials import (P0, P1, P2, P3, STATED_BERNSTEIN, RationalPoly,
                                         bernstein_coeffs, boundary_identity_holds,
                                         expected_h_bernstein, f_value, from_bernstein,
                                         h_bernstein_in_z, verify_poly_inequality)
from lpheat.appendix.sweeps import two_interval_sweep
from lpheat.errors import DomainError
from lpheat.scalar_math import RngStream

Q = Fraction
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=50)
unit = st.fractions(min_value=0, max_value=1, max_denominator=64)
polys = st.lists(rationals, min_size=1, max_size=7).map(RationalPoly)


class TestRationalPoly:
    def test_trim(self):
        assert RationalPoly([1, 2, 0, 0]).degree == 1
        assert RationalPoly([]).is_zero()

    @given(polys, polys, rationals)
    def test_ring_evaluation(self, a, b, x):
        assert (a + b)(x) == a(x) + b(x)
        assert (a * b)(x) == a(x) * b(x)
        assert (a - b)(x) == a(x) - b(x)

    @given(polys, polys, rationals)
    def test_compose(self, a, b, x):
        assert a.compose(b)(x) == a(b(x))

    @given(polys, polys)
    def test_divmod(self, a, b):
        if b.is_zero():
            return
        q, r = a.divmod(b)
        assert q * b + r == a
        assert r.is_zero() or r.degree < b.degree

    def test_pow_domain(self):
        with pytest.raises(DomainError):
            RationalPoly([1, 1]) ** -1


class TestBernstein:
    def test_p3(self):
        assert bernstein_coeffs(P3, 3) == (1, 1, 0, 2)

    def test_p1(self):
        assert bernstein_coeffs(P1, 5) == (3, 3, Q(12, 5), Q(6, 5), 0, 4)

    @given(st.integers(min_value=0, max_value=12))
    def test_partition_of_unity(self, d):
        assert bernstein_coeffs(RationalPoly([1]), d) == (1,) * (d + 1)

    @pytest.mark.parametrize("name", sorted(STATED_BERNSTEIN))
    def test_stated_lists(self, name):
        poly, stated = STATED_BERNSTEIN[name]
        got = bernstein_coeffs(poly, len(stated) - 1)
        assert got == stated
        assert all(c >= 0 for c in got)

    @given(polys, st.integers(min_value=0, max_value=4))
    def test_round_trip(self, poly, extra):
        assert from_bernstein(bernstein_coeffs(poly, poly.degree + extra)) == poly

    def test_degree_too_small(self):
        with pytest.raises(DomainError):
            bernstein_coeffs(P0, 3)


class TestPolynomialInequality:
    def test_half_half(self):
        assert f_value(Q(1, 2), Q(1, 2)) == Q(27, 64)

    def test_equality_at_one(self):
        assert f_value(Q(1), Q(1)) == 0

    def test_boundary_identity(self):
        assert boundary_identity_holds()

    def test_h_certificate(self):
        assert h_bernstein_in_z() == expected_h_bernstein()

    @given(unit, unit)
    def test_exact_nonnegative(self, s, z):
        r = s * s + z * (s - s * s)
        assert f_value(s, r) >= 0

    def test_randomized_sweep(self):
        rep = verify_poly_inequality(100_000, RngStream(1))
        assert rep.holds
        assert rep.negatives == 0
        assert rep.min_value >= 0


class TestTwoInterval:
    def test_equal_arguments(self):
        rep = two_interval_check(Q(1, 2), Q(1, 3), Q(1, 4), Q(1, 4))
        assert rep.slack == 0

    @given(unit, unit, unit)
    def test_large_ell(self, b, x, y):
        x, y = sorted((x, y))
        ell = b * y + x + y + b * x + 1
        rep = two_interval_check(ell, b, x, y)
        assert rep.q_xy == rep.q_yx == 4 * b * x * y

    def test_example(self):
        assert two_interval_check(0.8, 0.5, 0.3, 0.9).holds

    @given(st.fractions(min_value=0, max_value=3, max_denominator=64), unit, unit, unit)
    def test_property(self, ell, b, x, y):
        x, y = sorted((x, y))
        assert two_interval_check(ell, b, x, y).holds

    def test_sweep(self):
        rep = two_interval_sweep(10_000, RngStream(5))
        assert rep.holds and rep.count == 10_000

    @pytest.mark.parametrize("args", [(-1, 0.5, 0.1, 0.2), (1, 1.5, 0.1, 0.2), (1, 0.5, 0.3, 0.2)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            two_interval_check(*args)
