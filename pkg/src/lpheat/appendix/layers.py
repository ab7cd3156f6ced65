"""Centered and dual layer inequalities.

For B > 0 and u(s) = (1 - s^p)^alpha, alpha = 1/p, put

    G(s) = B u(s) - s   (strictly decreasing),
    H(s) = B u(s) + s   (increasing, then decreasing).

For a level L > 0 the active set {|G| < L < H} is a finite union of
intervals whose endpoints are simple roots of |G| = L or H = L. The layer
inequality compares an endpoint (coarea) sum over those roots with a bulk
integral over the active set. Roots are bracketed using the monotone
structure and refined by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import optimize

from ..errors import DomainError
from ..scalar_math import DEFAULT_QUAD, QuadratureSpec, integrate_adaptive

ROOT_XTOL = 1e-13
TANGENCY_EPS = 1e-9
# relative shift of x for endpoint roots of the dual form; a root that moves
# into the interior by ~1e-8 is still resolved far above ROOT_XTOL
ENDPOINT_EPS = 1e-8

CENTRAL = "Central"
MIXED = "Mixed"
CAP = "Cap"


def _bisect(f: Callable[[float], float], lo: float, hi: float) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise DomainError("root is not bracketed")
    return float(optimize.bisect(f, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200))


# ---------------------------------------------------------------------------
# Weighted beta-trapezoid
# ---------------------------------------------------------------------------


@dataclass
class TrapezoidReport:
    lhs: float
    rhs: float
    err: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + self.err


def beta_trapezoid_check(alpha: float, delta: float, a: float, b: float,
                         spec: QuadratureSpec = DEFAULT_QUAD) -> TrapezoidReport:
    """alpha int_a^b t^{2alpha-1} (1-t)^delta dt <= (b^{2alpha} - a^{2alpha}) ((1-a)^delta + (1-b)^delta) / 4."""
    if not 0.5 < alpha < 1.0:
        raise DomainError("alpha must lie in (1/2, 1)")
    if not delta >= 3.0 * alpha - 1e-15:
        raise DomainError("delta must be at least 3 alpha")
    if not 0.0 <= a <= b <= 1.0:
        raise DomainError("need 0 <= a <= b <= 1")
    rhs = (b ** (2 * alpha) - a ** (2 * alpha)) * ((1 - a) ** delta + (1 - b) ** delta) / 4.0
    if a == b:
        return TrapezoidReport(0.0, rhs, 0.0)
    # the t^{2 alpha - 1} and (1 - t)^delta endpoint factors go to QUADPACK's algebraic weight
    if a == 0.0 and b == 1.0:
        val, err = integrate_adaptive(lambda t: 1.0, 0.0, 1.0, spec, weight="alg",
                                      wvar=(2 * alpha - 1, delta))
    elif a == 0.0:
        val, err = integrate_adaptive(lambda t: (1 - t) ** delta, 0.0, b, spec, weight="alg",
                                      wvar=(2 * alpha - 1, 0.0))
    else:
        val, err = integrate_adaptive(lambda t: t ** (2 * alpha - 1) * (1 - t) ** delta, a, b, spec)
    return TrapezoidReport(alpha * val, rhs, alpha * err + 1e-15)


# ---------------------------------------------------------------------------
# Root configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LayerRoot:
    location: float
    equation: str   # "G=L", "G=-L" or "H=L"
    branch: str     # "decreasing" for G; "increasing" / "decreasing" for H


@dataclass(frozen=True)
class LayerComponent:
    lo: float
    hi: float
    kind: str
    opening: str
    closing: str


@dataclass(frozen=True)
class LayerScenario:
    alpha: float
    exponent: float      # delta for the centered form
    coefficient: float   # B
    level: float         # L
    roots: tuple = ()
    components: tuple = ()
    critical_point: float = float("nan")
    tangent: bool = False

    def __post_init__(self):
        if not 0.5 < self.alpha < 1.0:
            raise DomainError("alpha must lie in (1/2, 1)")
        if not self.coefficient > 0:
            raise DomainError("the coefficient B must be > 0")
        if not self.level > 0:
            raise DomainError("the level L must be > 0")

    @property
    def p(self) -> float:
        return 1.0 / self.alpha

    def u(self, s):
        return (1.0 - s**self.p) ** self.alpha

    def du(self, s):
        """u'(s) = -s^{p-1} (1 - s^p)^{alpha - 1}."""
        return -(s ** (self.p - 1.0)) * (1.0 - s**self.p) ** (self.alpha - 1.0)

    def g(self, s):
        return self.coefficient * self.u(s) - s

    def h(self, s):
        return self.coefficient * self.u(s) + s

    def dg(self, s):
        return self.coefficient * self.du(s) - 1.0

    def dh(self, s):
        return self.coefficient * self.du(s) + 1.0

    def active(self, s) -> bool:
        return abs(self.g(s)) < self.level < self.h(s)


def h_critical_point(scenario: LayerScenario) -> float:
    """Unique zero of H' = 1 - B s^{p-1} (1 - s^p)^{alpha-1} in (0, 1).

    Solved in y = log(1 - s^p): for small B the zero sits closer to s = 1
    than double precision resolves in s itself. When it is beyond reach the
    returned point is 1.0 (H is increasing on all representable s < 1).
    """
    p, a, b = scenario.p, scenario.alpha, scenario.coefficient

    # log(B s^{p-1} (1-s^p)^{alpha-1}) with s^p = 1 - e^y; decreasing in y
    def f(y):
        return (p - 1.0) / p * math.log1p(-math.exp(y)) + (a - 1.0) * y + math.log(b)

    lo, hi = -740.0, -1e-300
    if f(lo) < 0:
        return 1.0
    if f(-1e-16) > 0:
        return 0.0
    y = _bisect(f, lo, -1e-16)
    return math.exp(math.log1p(-math.exp(y)) / p)


def layer_roots(scenario: LayerScenario) -> LayerScenario:
    """Roots of |G| = L and H = L, their branches, and the active components."""
    sc = scenario
    level, b = sc.level, sc.coefficient
    roots: list[LayerRoot] = []
    # G decreases from G(0) = B to G(1) = -1
    if level < b:
        roots.append(LayerRoot(_bisect(lambda s: sc.g(s) - level, 0.0, 1.0), "G=L", "decreasing"))
    if level < 1.0:
        roots.append(LayerRoot(_bisect(lambda s: sc.g(s) + level, 0.0, 1.0), "G=-L", "decreasing"))
    s_c = h_critical_point(sc)
    h_max = sc.h(s_c)
    if b < level < h_max:
        roots.append(LayerRoot(_bisect(lambda s: sc.h(s) - level, 0.0, s_c), "H=L", "increasing"))
    if 1.0 < level < h_max:
        roots.append(LayerRoot(_bisect(lambda s: sc.h(s) - level, s_c, 1.0), "H=L", "decreasing"))
    roots.sort(key=lambda r: r.location)
    tangent = (min(abs(level - b), abs(level - 1.0), abs(level - h_max)) < TANGENCY_EPS)

    # components: scan the cells between consecutive roots
    edges = [0.0] + [r.location for r in roots] + [1.0]
    labels = [None] + roots + [None]
    components = []
    for i in range(len(edges) - 1):
        lo, hi = edges[i], edges[i + 1]
        if hi <= lo or not sc.active(0.5 * (lo + hi)):
            continue
        opening = labels[i].equation if labels[i] is not None else "endpoint"
        closing = labels[i + 1].equation if labels[i + 1] is not None else "endpoint"
        if level < 1.0:
            kind = CENTRAL if opening == "G=L" else MIXED
        else:
            kind = CAP
        components.append(LayerComponent(lo, hi, kind, opening, closing))
    return replace(sc, roots=tuple(roots), components=tuple(components), critical_point=s_c,
                   tangent=tangent)


# ---------------------------------------------------------------------------
# Weighted centered layer inequality
# ---------------------------------------------------------------------------


@dataclass
class LayerReport:
    lhs: float
    rhs: float
    err: float
    scenario: LayerScenario
    perturbed: list = field(default_factory=list)  # reports at L(1 -+ eps) for tangent cases

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    @property
    def holds(self) -> bool:
        own = self.lhs >= self.rhs - self.err
        if self.perturbed:
            return all(r.holds for r in self.perturbed)
        return own


def _wcl_sides(sc: LayerScenario, spec: QuadratureSpec) -> tuple[float, float, float]:
    p, delta, b, level = sc.p, sc.exponent, sc.coefficient, sc.level
    lhs = 0.0
    for r in sc.roots:
        s = r.location
        weight = (1.0 - s**p) ** (delta + sc.alpha)
        deriv = abs(sc.dh(s)) if r.equation == "H=L" else abs(sc.dg(s))
        lhs += level * b * weight / deriv
    rhs, err = 0.0, 0.0
    for comp in sc.components:
        val, e = integrate_adaptive(lambda s: s * (1.0 - s**p) ** delta, comp.lo, comp.hi, spec)
        rhs += val
        err += e
    return lhs, rhs, err


def wcl_check(scenario: LayerScenario, spec: QuadratureSpec = DEFAULT_QUAD) -> LayerReport:
    """Endpoint sum >= bulk integral for one (alpha, delta, B, L)."""
    if not scenario.exponent >= 3.0 * scenario.alpha - 1e-15:
        raise DomainError("the centered layer inequality needs delta >= 3 alpha")
    sc = layer_roots(scenario)
    lhs, rhs, err = _wcl_sides(sc, spec)
    tol = err + 1e-12 * max(1.0, abs(rhs))
    report = LayerReport(lhs, rhs, tol, sc)
    if sc.tangent:
        for sign in (-1.0, 1.0):
            moved = replace(scenario, level=scenario.level * (1.0 + sign * TANGENCY_EPS))
            msc = layer_roots(moved)
            ml, mr, me = _wcl_sides(msc, spec)
            report.perturbed.append(LayerReport(ml, mr, me + 1e-12 * max(1.0, abs(mr)), msc))
    return report


# ---------------------------------------------------------------------------
# Dual layer inequality
# ---------------------------------------------------------------------------


@dataclass
class DualLayerReport:
    lhs: float
    rhs: float
    err: float
    mapped_lhs: float
    mapped_rhs: float
    direct_roots: tuple
    mapped: LayerReport | None = None
    degenerate: bool = False
    perturbed: list = field(default_factory=list)  # reports at x(1 -+ ENDPOINT_EPS)

    @property
    def holds(self) -> bool:
        if self.perturbed:
            return all(r.holds for r in self.perturbed)
        direct = self.lhs >= self.rhs - self.err
        return direct and (self.mapped is None or self.mapped.holds)

    @property
    def route_gap(self) -> float:
        """Largest relative disagreement of the direct and mapped evaluations."""
        if self.perturbed:
            return max(r.route_gap for r in self.perturbed)
        gaps = [abs(self.lhs - self.mapped_lhs) / max(1.0, abs(self.lhs)),
                abs(self.rhs - self.mapped_rhs) / max(1.0, abs(self.rhs))]
        return max(gaps)


def _scan_roots(f: Callable[[float], float], grid: np.ndarray) -> list[float]:
    vals = np.array([f(s) for s in grid])
    out = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            out.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            out.append(_bisect(f, float(grid[i]), float(grid[i + 1])))
    return out


def _dlt_direct(alpha, beta, A, x, spec, grid_points):
    p = 1.0 / alpha
    expo = beta + alpha - 1.0

    def u(s):
        return (1.0 - s**p) ** alpha

    def du(s):
        return -(s ** (p - 1.0)) * (1.0 - s**p) ** (alpha - 1.0)

    def h(s):
        return (1.0 + A * s) / u(s)

    def g(s):
        return (1.0 - A * s) / u(s)

    def dh(s):
        return (A * u(s) - (1.0 + A * s) * du(s)) / u(s) ** 2

    def dg(s):
        return (-A * u(s) - (1.0 - A * s) * du(s)) / u(s) ** 2

    # grid dense near s = 1, where u -> 0 and g, h blow up
    k = np.linspace(0.0, 1.0, grid_points)
    grid = 1.0 - (1.0 - k) ** 3
    grid[-1] = 1.0 - 1e-15
    roots = []
    for name, f in (("h=x", lambda s: h(s) - x), ("g=x", lambda s: g(s) - x), ("g=-x", lambda s: g(s) + x)):
        roots.extend((r, name) for r in _scan_roots(f, grid))
    roots.sort()
    lhs = 0.0
    for s, name in roots:
        deriv = abs(dh(s)) if name == "h=x" else abs(dg(s))
        lhs += x * (1.0 - s**p) ** expo / deriv
    edges = [0.0] + [r for r, _ in roots] + [1.0]
    rhs, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        if hi > lo and abs(g(mid)) < x < h(mid):
            val, e = integrate_adaptive(lambda s: s * (1.0 - s**p) ** expo, lo, hi, spec)
            rhs += A * val
            err += A * e
    return lhs, rhs, err + 1e-12 * max(1.0, abs(rhs)), tuple(roots)


def dlt_check(alpha: float, beta: float, a_coef: float, x_level: float,
              spec: QuadratureSpec = DEFAULT_QUAD, grid_points: int = 4000,
              _perturb: bool = True) -> DualLayerReport:
    """Dual layer inequality, evaluated directly and through the centered form.

    Direct route: h(s) = (1 + A s)/u(s), g(s) = (1 - A s)/u(s) on [0, 1);
    roots of |g| = x and h = x are found by a grid scan plus bisection.
    Mapped route: B = x/A, L = 1/A, delta = beta + alpha - 1 in
    :func:`wcl_check`, whose two sides are multiplied by A.

    At x = 1 both g and h start at the level (g(0) = h(0) = 1), an
    endpoint root that only has meaning as a limit; such inputs, and
    tangencies of the centered form, are evaluated at x (1 -+ ENDPOINT_EPS).
    """
    if not 0.5 < alpha < 1.0:
        raise DomainError("alpha must lie in (1/2, 1)")
    if not beta >= 1.0 + 2.0 * alpha - 1e-15:
        raise DomainError("the dual layer inequality needs beta >= 1 + 2 alpha")
    if not a_coef >= 0:
        raise DomainError("A must be >= 0")
    if not x_level > 0:
        raise DomainError("x must be > 0")
    if a_coef == 0.0:
        return DualLayerReport(0.0, 0.0, 0.0, 0.0, 0.0, ())
    A, x = a_coef, x_level
    expo = beta + alpha - 1.0
    lhs, rhs, err, roots = _dlt_direct(alpha, beta, A, x, spec, grid_points)
    mapped = wcl_check(LayerScenario(alpha, expo, x / A, 1.0 / A), spec)
    degenerate = abs(x - 1.0) < TANGENCY_EPS or any(r <= 1e-12 for r, _ in roots) or mapped.scenario.tangent
    report = DualLayerReport(lhs, rhs, err, A * mapped.lhs, A * mapped.rhs, roots, mapped, degenerate)
    if degenerate and _perturb:
        for sign in (-1.0, 1.0):
            report.perturbed.append(dlt_check(alpha, beta, A, x * (1.0 + sign * ENDPOINT_EPS),
                                              spec, grid_points, _perturb=False))
    return report
