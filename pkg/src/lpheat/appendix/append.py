"""Quadratic-layer second derivative and the beta-Rademacher append step.

For smooth L > 0, D >= 0, W >= 0 on an interval I,

    F(x) = int_I W (1/2) [(L^2 - (x + D)^2)_+ + (L^2 - (x - D)^2)_+] dR,

and G(q) = F(sqrt q) satisfies

    4 x^3 G''(q) = x sum_{|L-D| = x} W L / |(L-D)'| + x sum_{L+D = x} W L / |(L+D)'|
                   - int_{|L-D| < x < L+D} W D dR.

:func:`second_derivative_identity_check` compares a five-point finite
difference of G against the right side. :func:`append_lemma_check` verifies
the lower stop-loss inequality that this identity feeds: appending
(1-T)^alpha Y + c T^alpha eps with T ~ Beta(alpha, beta) preserves squared
convex order of Y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from ..errors import DomainError
from ..scalar_math import DEFAULT_QUAD, QuadratureSpec, integrate_adaptive
from .layers import _bisect

# quadrature for quantities that are differentiated numerically
FINE_QUAD = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-13, max_subdivisions=400)


def _grid_roots(f: Callable[[float], float], lo: float, hi: float, points: int = 801) -> list[float]:
    grid = np.linspace(lo, hi, points)
    vals = [f(x) for x in grid]
    roots = []
    for i in range(points - 1):
        if vals[i] == 0.0 and 0 < i:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(_bisect(f, float(grid[i]), float(grid[i + 1])))
    return roots


# ---------------------------------------------------------------------------
# Second derivative identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LayerTestCase:
    """Smooth layer data (L, D, W) with derivatives on [r_lo, r_hi]."""

    name: str
    L: Callable[[float], float]
    dL: Callable[[float], float]
    D: Callable[[float], float]
    dD: Callable[[float], float]
    W: Callable[[float], float]
    r_lo: float
    r_hi: float


def constant_case() -> LayerTestCase:
    """L = 1, D = 0, W = 1 on [0, 1]: F(x) = (1 - x^2)_+."""
    return LayerTestCase("constant", lambda r: 1.0, lambda r: 0.0, lambda r: 0.0, lambda r: 0.0,
                         lambda r: 1.0, 0.0, 1.0)


def quadratic_exp_case() -> LayerTestCase:
    """L = 1 + R^2, D = R, W = e^{-R} on [0, 2]."""
    return LayerTestCase("quadratic-exp", lambda r: 1.0 + r * r, lambda r: 2.0 * r,
                         lambda r: r, lambda r: 1.0, lambda r: math.exp(-r), 0.0, 2.0)


def append_layer_case(alpha: float, beta: float, c: float, rho: float, r_max: float = 60.0) -> LayerTestCase:
    """The (L, D, W) of the append step, truncated to [0, r_max]."""
    p = 1.0 / alpha
    return LayerTestCase(
        "append",
        lambda r: rho * (1.0 + r**p) ** alpha,
        lambda r: rho * r ** (p - 1.0) * (1.0 + r**p) ** (alpha - 1.0),
        lambda r: c * r,
        lambda r: c,
        lambda r: (1.0 + r**p) ** (-beta - 3.0 * alpha),
        0.0, r_max,
    )


def _layer_kinks(case: LayerTestCase, x: float) -> dict[str, list[float]]:
    lo, hi = case.r_lo, case.r_hi
    return {
        "L-D=x": _grid_roots(lambda r: case.L(r) - case.D(r) - x, lo, hi),
        "L-D=-x": _grid_roots(lambda r: case.L(r) - case.D(r) + x, lo, hi),
        "L+D=x": _grid_roots(lambda r: case.L(r) + case.D(r) - x, lo, hi),
    }


def layer_f(case: LayerTestCase, x: float, spec: QuadratureSpec = FINE_QUAD) -> float:
    """F(x), integrated piecewise between the kinks of the positive parts."""
    kinks = sorted(r for roots in _layer_kinks(case, x).values() for r in roots)

    def integrand(r):
        l, d = case.L(r), case.D(r)
        return case.W(r) * 0.5 * (max(l * l - (x + d) ** 2, 0.0) + max(l * l - (x - d) ** 2, 0.0))

    val, _ = integrate_adaptive(integrand, case.r_lo, case.r_hi, spec, points=kinks)
    return val


def layer_rhs(case: LayerTestCase, x: float, spec: QuadratureSpec = FINE_QUAD) -> float:
    """Endpoint sums minus bulk: the right side of the identity."""
    kinks = _layer_kinks(case, x)
    endpoint = 0.0
    for r in kinks["L-D=x"] + kinks["L-D=-x"]:
        endpoint += case.W(r) * case.L(r) / abs(case.dL(r) - case.dD(r))
    for r in kinks["L+D=x"]:
        endpoint += case.W(r) * case.L(r) / abs(case.dL(r) + case.dD(r))
    edges = sorted({case.r_lo, case.r_hi, *(r for roots in kinks.values() for r in roots)})
    bulk = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b)
        l, d = case.L(mid), case.D(mid)
        if b > a and abs(l - d) < x < l + d:
            val, _ = integrate_adaptive(lambda r: case.W(r) * case.D(r), a, b, spec)
            bulk += val
    return x * endpoint - bulk


@dataclass
class SecondDerivativeReport:
    x: float
    lhs: float           # 4 x^3 G''(q) by finite differences
    rhs: float
    step: float
    refinements: int

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)

    def holds(self, tol: float = 1e-6) -> bool:
        return self.gap <= tol


def _g_second(case: LayerTestCase, q: float, hq: float, spec: QuadratureSpec) -> float:
    vals = [layer_f(case, math.sqrt(q + k * hq), spec) for k in (-2, -1, 0, 1, 2)]
    return (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12.0 * hq * hq)


def second_derivative_identity_check(case: LayerTestCase, x: float, rel_step: float = 2e-3,
                                     spec: QuadratureSpec = FINE_QUAD, max_refine: int = 4,
                                     agree: float = 1e-7) -> SecondDerivativeReport:
    """Compare 4 x^3 G''(q) (five-point stencil in q = x^2) with the explicit side.

    The stencil is halved until two successive steps agree to ``agree``
    (a stencil straddling a kink of G'' shows up as disagreement).
    """
    if not x > 0:
        raise DomainError("x must be > 0")
    q = x * x
    hq = rel_step * q
    prev = 4 * x**3 * _g_second(case, q, hq, spec)
    refinements = 0
    while refinements < max_refine:
        cur = 4 * x**3 * _g_second(case, q, hq / 2, spec)
        if abs(cur - prev) <= agree:
            prev = cur
            hq /= 2
            break
        prev, hq = cur, hq / 2
        refinements += 1
    return SecondDerivativeReport(x, prev, layer_rhs(case, x, spec), hq, refinements)


# ---------------------------------------------------------------------------
# Append lemma
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteLaw:
    values: tuple
    probs: tuple

    def __init__(self, values: Sequence[float], probs: Sequence[float] | None = None):
        v = np.asarray(values, dtype=float).ravel()
        w = np.full(v.size, 1.0 / v.size) if probs is None else np.asarray(probs, dtype=float).ravel()
        if v.size == 0 or v.size != w.size:
            raise DomainError("a discrete law needs matching non-empty values and probabilities")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise DomainError("probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "values", tuple(float(x) for x in v))
        object.__setattr__(self, "probs", tuple(float(x) for x in w))

    def squares(self) -> np.ndarray:
        return np.asarray(self.values) ** 2

    def expect(self, f: Callable[[float], float]) -> float:
        return math.fsum(p * f(v) for v, p in zip(self.values, self.probs))

    def lower_stop_loss(self, a: float) -> float:
        return math.fsum(p * max(a - v * v, 0.0) for v, p in zip(self.values, self.probs))


def squared_convex_order(y1: DiscreteLaw, y2: DiscreteLaw, tol: float = 1e-12) -> bool:
    """Y1^2 <=cx Y2^2 for discrete laws: equal means and lower stop-loss at every atom.

    Both stop-loss transforms are piecewise linear with kinks at the atoms,
    so comparing them at the atoms of both laws is exact.
    """
    m1, m2 = y1.expect(lambda v: v * v), y2.expect(lambda v: v * v)
    if abs(m1 - m2) > tol * max(1.0, abs(m1)):
        return False
    atoms = sorted(set(y1.squares().tolist()) | set(y2.squares().tolist()))
    return all(y1.lower_stop_loss(a) <= y2.lower_stop_loss(a) + tol for a in atoms)


def appended_expectation(alpha: float, beta: float, c: float, rho: float, y: float,
                         spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """E_{T,eps} (rho^2 - ((1-T)^alpha y + c T^alpha eps)^2)_+ with T ~ Beta(alpha, beta).

    With tau = T^alpha the Beta density becomes (p / B(alpha, beta))
    (1 - tau^p)^{beta-1} d tau on [0, 1], free of the t^{alpha-1} singularity.
    """
    p = 1.0 / alpha
    y = abs(y)
    norm = p / special.beta(alpha, beta)
    total = 0.0
    for sgn in (1.0, -1.0):
        def z(tau, sgn=sgn):
            return (1.0 - tau**p) ** alpha * y + sgn * c * tau

        kinks = _grid_roots(lambda t: z(t) - rho, 0.0, 1.0) + _grid_roots(lambda t: z(t) + rho, 0.0, 1.0)

        def integrand(tau, z=z):
            return (1.0 - tau**p) ** (beta - 1.0) * max(rho * rho - z(tau) ** 2, 0.0)

        val, _ = integrate_adaptive(integrand, 0.0, 1.0, spec, points=sorted(kinks))
        total += 0.5 * val
    return norm * total


@dataclass
class AppendReport:
    rho_grid: np.ndarray
    lhs: np.ndarray   # E (rho^2 - Z_1^2)_+ after appending to Y1
    rhs: np.ndarray   # same for Y2
    second_moments: tuple
    g_convex: bool
    tol: float

    @property
    def holds(self) -> bool:
        return bool(np.all(self.lhs <= self.rhs + self.tol)) and self.second_moments_equal

    @property
    def second_moments_equal(self) -> bool:
        a, b = self.second_moments
        return abs(a - b) <= 1e-12 * max(1.0, abs(a))


def append_lemma_check(alpha: float, beta: float, c: float, y1_law: DiscreteLaw, y2_law: DiscreteLaw,
                       rho_grid: Sequence[float] | None = None,
                       spec: QuadratureSpec = DEFAULT_QUAD, tol: float = 1e-10) -> AppendReport:
    """Lower stop-loss comparison after appending one Beta-Rademacher coordinate."""
    if not 0.5 < alpha < 1.0:
        raise DomainError("alpha must lie in (1/2, 1)")
    if not beta >= 1.0 + 2.0 * alpha - 1e-15:
        raise DomainError("the append step needs beta >= 1 + 2 alpha")
    if not c >= 0:
        raise DomainError("c must be >= 0")
    if not squared_convex_order(y1_law, y2_law):
        raise DomainError("the input laws are not in squared convex order")
    top = max(max(abs(v) for v in y1_law.values + y2_law.values), c, 1e-3)
    grid = np.linspace(0.05, 1.5, 12) * (top + c) if rho_grid is None else np.asarray(rho_grid, dtype=float)

    def g_of(rho, y):
        return appended_expectation(alpha, beta, c, float(rho), y, spec)

    lhs = np.array([y1_law.expect(lambda y, r=r: g_of(r, y)) for r in grid])
    rhs = np.array([y2_law.expect(lambda y, r=r: g_of(r, y)) for r in grid])
    b = special.beta(alpha, beta)
    e_scale = special.beta(alpha, beta + 2 * alpha) / b   # E (1-T)^{2 alpha}
    e_coef = special.beta(3 * alpha, beta) / b            # E T^{2 alpha}
    moments = tuple(e_scale * law.expect(lambda v: v * v) + c * c * e_coef for law in (y1_law, y2_law))
    # convexity of q -> G(q) on a grid, at the middle threshold
    rho_mid = float(grid[len(grid) // 2])
    qs = np.linspace(0.0, (top + c) ** 2, 17)
    gq = np.array([g_of(rho_mid, math.sqrt(q)) for q in qs])
    convex = bool(np.all(np.diff(gq, 2) >= -1e-10))
    return AppendReport(grid, lhs, rhs, moments, convex, tol)
