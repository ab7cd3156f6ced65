"""Exact rational polynomials and the Bernstein certificate of the quartic inequality.

The inequality in question is

    F_s(r) = 2 (1 + r^2 s)^2 - (1 + s^2)(1 + r)(1 + r^3) >= 0,   s^2 <= r <= s,

and its certificate consists of four univariate polynomials in s with
nonnegative Bernstein coefficients on [0, 1]. Everything here is computed
with :class:`fractions.Fraction`; floating point only enters the randomized
sweep, and any sample that comes out negative or near zero in floating point
is re-evaluated exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..errors import DomainError
from ..scalar_math import RngStream, as_generator

Q = Fraction


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)  # exact binary value
    return Fraction(x)


@dataclass(frozen=True)
class RationalPoly:
    """Polynomial with exact rational coefficients, ascending degree."""

    coefficients: tuple

    def __init__(self, coefficients: Iterable = (0,)):
        coeffs = [_to_fraction(c) for c in coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [Fraction(0)]
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "RationalPoly":
        return cls([0] * degree + [coeff])

    @classmethod
    def x(cls) -> "RationalPoly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return self.coefficients == (Fraction(0),)

    def __call__(self, x):
        if isinstance(x, RationalPoly):
            return self.compose(x)
        acc = 0 if not isinstance(x, (Fraction, int)) else Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + (c if isinstance(x, (Fraction, int)) else float(c))
        return acc

    def _coerce(self, other) -> "RationalPoly":
        return other if isinstance(other, RationalPoly) else RationalPoly([other])

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        return RationalPoly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly([-c for c in self.coefficients])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if int(k) != k or k < 0:
            raise DomainError("polynomial powers need a nonnegative integer")
        out = RationalPoly([1])
        for _ in range(int(k)):
            out = out * self
        return out

    def __truediv__(self, scalar):
        s = _to_fraction(scalar)
        return RationalPoly([c / s for c in self.coefficients])

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            other = RationalPoly([other])
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def compose(self, inner: "RationalPoly") -> "RationalPoly":
        out = RationalPoly([0])
        for c in reversed(self.coefficients):
            out = out * inner + c
        return out

    def divmod(self, divisor: "RationalPoly") -> tuple["RationalPoly", "RationalPoly"]:
        """Euclidean division with exact quotient and remainder."""
        if divisor.is_zero():
            raise DomainError("division by the zero polynomial")
        rem = list(self.coefficients)
        d = divisor.coefficients
        quot = [Fraction(0)] * max(1, len(rem) - len(d) + 1)
        for shift in range(len(rem) - len(d), -1, -1):
            factor = rem[shift + len(d) - 1] / d[-1]
            quot[shift] = factor
            for j, c in enumerate(d):
                rem[shift + j] -= factor * c
        return RationalPoly(quot), RationalPoly(rem[: max(1, len(d) - 1)])

    def __repr__(self):
        terms = [f"{c}*s^{i}" for i, c in enumerate(self.coefficients) if c != 0]
        return "RationalPoly(" + (" + ".join(terms) if terms else "0") + ")"


def bernstein_coeffs(poly: RationalPoly, degree: int | None = None) -> tuple[Fraction, ...]:
    """Bernstein coefficients on [0, 1]: b_k = sum_{i<=k} C(k,i)/C(d,i) a_i."""
    d = poly.degree if degree is None else int(degree)
    if d < poly.degree:
        raise DomainError(f"degree {d} is below the polynomial degree {poly.degree}")
    a = list(poly.coefficients) + [Fraction(0)] * (d - poly.degree)
    return tuple(
        sum((Fraction(math.comb(k, i), math.comb(d, i)) * a[i] for i in range(k + 1)), Fraction(0))
        for k in range(d + 1)
    )


def from_bernstein(coeffs: Sequence) -> RationalPoly:
    """Inverse transform: sum_k b_k C(d,k) s^k (1-s)^{d-k}."""
    d = len(coeffs) - 1
    s = RationalPoly.x()
    one_minus = RationalPoly([1, -1])
    out = RationalPoly([0])
    for k, b in enumerate(coeffs):
        out = out + _to_fraction(b) * math.comb(d, k) * s**k * one_minus ** (d - k)
    return out


# --- polynomials of the certificate --------------------------------------

P0 = RationalPoly([1, 1, -1, -3, 0, 1, 2, 1])
P1 = RationalPoly([3, 0, -6, 0, 3, 4])
P2 = RationalPoly([3, 3, -8, -3, 9, 6])
P3 = RationalPoly([1, 0, -3, 4])

STATED_BERNSTEIN = {
    "P0": (P0, (Q(1), Q(8, 7), Q(26, 21), Q(6, 5), Q(33, 35), Q(3, 7), Q(0), Q(2))),
    "P1": (P1, (Q(3), Q(3), Q(12, 5), Q(6, 5), Q(0), Q(4))),
    "P2": (P2, (Q(3), Q(18, 5), Q(17, 5), Q(21, 10), Q(6, 5), Q(10))),
    "P3": (P3, (Q(1), Q(1), Q(0), Q(2))),
}


def f_poly_coeffs_in_r() -> list[RationalPoly]:
    """F_s(r) as a polynomial in r whose coefficients are polynomials in s."""
    s = RationalPoly.x()
    one = RationalPoly([1])
    # 2 (1 + r^2 s)^2 = 2 + 4 s r^2 + 2 s^2 r^4
    # (1+s^2)(1+r)(1+r^3) = (1+s^2)(1 + r + r^3 + r^4)
    w = one + s * s
    return [2 * one - w, -w, 4 * s, -w, 2 * s * s - w]


def f_value(s, r):
    """F_s(r) for scalars or numpy arrays (exact for Fractions)."""
    return 2 * (1 + r * r * s) ** 2 - (1 + s * s) * (1 + r) * (1 + r**3)


def _poly_in_r_eval_at(coeffs_r: list[RationalPoly], r_as_poly_in_s: RationalPoly) -> RationalPoly:
    out = RationalPoly([0])
    for c in reversed(coeffs_r):
        out = out * r_as_poly_in_s + c
    return out


def h_bernstein_in_z() -> tuple[RationalPoly, ...]:
    """Bernstein coefficients (in z, degree 3) of -H_s(s^2 + z(s - s^2)).

    H_s is the exact quotient (F_s(r) - F_s(s)) / (r - s). Its coefficients
    are polynomials in s; each is returned as a RationalPoly in s.
    """
    s = RationalPoly.x()
    f_r = f_poly_coeffs_in_r()
    # synthetic division of F(r) - F(s) by (r - s) over Q[s]
    deg = len(f_r) - 1
    quotient = [RationalPoly([0])] * deg
    carry = RationalPoly([0])
    for i in range(deg, 0, -1):
        carry = carry * s + f_r[i]
        quotient[i - 1] = carry
    # remainder carry * s + f_r[0] equals F_s(s); H_s(r) = sum quotient[i] r^i
    # substitute r = s^2 + z (s - s^2): r^i expands in z with Q[s] coefficients
    base, step = s * s, s - s * s
    h_in_z = [RationalPoly([0])] * deg  # degree deg-1 = 3 in z
    for i, qi in enumerate(quotient):
        for j in range(i + 1):
            term = qi * math.comb(i, j) * base ** (i - j) * step**j
            h_in_z[j] = h_in_z[j] + term
    d = deg - 1
    return tuple(
        -sum((Fraction(math.comb(k, i), math.comb(d, i)) * h_in_z[i] for i in range(k + 1)),
             RationalPoly([0]))
        for k in range(d + 1)
    )


def expected_h_bernstein() -> tuple[RationalPoly, ...]:
    s = RationalPoly.x()
    one_m = RationalPoly([1, -1])
    one_p = RationalPoly([1, 1])
    return (one_m * P0, one_m * one_p * P1 / 3, one_m * P2 / 3, one_m * one_p * P3)


@dataclass
class PolyInequalityReport:
    lists_match: dict
    h_certificate_match: bool
    boundary_identity: bool
    samples: int
    min_value: float
    negatives: int
    exact_rechecks: int

    @property
    def holds(self) -> bool:
        return (all(self.lists_match.values()) and self.h_certificate_match
                and self.boundary_identity and self.negatives == 0)


def boundary_identity_holds() -> bool:
    """F_s(s) = (1-s)^2 (1+s)^2 (s^2 - s + 1) as polynomials in s."""
    s = RationalPoly.x()
    f_r = f_poly_coeffs_in_r()
    lhs = _poly_in_r_eval_at(f_r, s)
    rhs = RationalPoly([1, -1]) ** 2 * RationalPoly([1, 1]) ** 2 * RationalPoly([1, -1, 1])
    return lhs == rhs


def verify_poly_inequality(sample_count: int = 100_000, rng=None, recheck_below: float = 1e-12) -> PolyInequalityReport:
    """Exact certificate checks plus a randomized sweep of F_s(r) >= 0."""
    lists = {name: bernstein_coeffs(poly, len(stated) - 1) == stated
             for name, (poly, stated) in STATED_BERNSTEIN.items()}
    h_match = h_bernstein_in_z() == expected_h_bernstein()
    boundary = boundary_identity_holds()
    gen = as_generator(rng if rng is not None else RngStream(0))
    s = gen.uniform(0.0, 1.0, sample_count)
    z = gen.uniform(0.0, 1.0, sample_count)
    r = s * s + z * (s - s * s)
    vals = f_value(s, r)
    suspicious = np.flatnonzero(vals < recheck_below)
    negatives = 0
    for i in suspicious:
        sf, rf = Fraction(float(s[i])), Fraction(float(r[i]))
        if not (sf * sf <= rf <= sf):
            continue  # rounding pushed r outside the admissible band
        if f_value(sf, rf) < 0:
            negatives += 1
    min_val = float(vals.min()) if sample_count else float("nan")
    return PolyInequalityReport(lists, h_match, boundary, int(sample_count), min_val,
                                negatives, int(suspicious.size))
