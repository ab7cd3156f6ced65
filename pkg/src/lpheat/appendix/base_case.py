"""Two-dimensional base case of the squared-projection convex order.

With theta(phi) = (cos phi, sin phi), 0 <= phi <= pi/4, and X uniform on
B_p^2, the lower stop-loss integral

    F_rho(phi) = int_{B_p^2} (rho^2 - <theta(phi), x>^2)_+ dx

is nonincreasing in phi. Two independent evaluations are provided:

* iterated quadrature, with the inner integral over x_2 done in closed
  form (the integrand is a clipped cubic antiderivative in <theta, x>);
* the boundary identity for -F_rho'(phi), a one-dimensional integral of the
  two-interval difference Q_l(x, y) - Q_l(y, x) against a positive weight.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import DomainError
from ..scalar_math import QuadratureSpec, integrate_adaptive
from .append import FINE_QUAD, _grid_roots

# ---------------------------------------------------------------------------
# Two-interval comparison (exact)
# ---------------------------------------------------------------------------


def _exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def phi_ell(ell, t):
    """(ell^2 - t^2)_+ (exact for Fractions)."""
    v = ell * ell - t * t
    return v if v > 0 else 0 * v


def q_ell(ell, b_coef, x, y):
    """Q_l(x, y) = Phi_l(B y - x) - Phi_l(B y + x)."""
    return phi_ell(ell, b_coef * y - x) - phi_ell(ell, b_coef * y + x)


@dataclass(frozen=True)
class TwoIntervalReport:
    q_xy: Fraction
    q_yx: Fraction

    @property
    def holds(self) -> bool:
        return self.q_xy >= self.q_yx

    @property
    def slack(self) -> Fraction:
        return self.q_xy - self.q_yx


def two_interval_check(ell, b_coef, x, y) -> TwoIntervalReport:
    """Exact comparison Q_l(x, y) >= Q_l(y, x) for l >= 0, 0 <= B <= 1, 0 <= x <= y."""
    ell, b_coef, x, y = (_exact(v) for v in (ell, b_coef, x, y))
    if ell < 0:
        raise DomainError("l must be >= 0")
    if not 0 <= b_coef <= 1:
        raise DomainError("B must lie in [0, 1]")
    if not 0 <= x <= y:
        raise DomainError("need 0 <= x <= y")
    return TwoIntervalReport(q_ell(ell, b_coef, x, y), q_ell(ell, b_coef, y, x))


# ---------------------------------------------------------------------------
# F_rho by iterated quadrature
# ---------------------------------------------------------------------------


def _check_p(p: float):
    if not 1.0 < p < 2.0:
        raise DomainError(f"the base case needs 1 < p < 2, got {p!r}")


def stop_loss_2d(p: float, phi: float, rho: float, spec: QuadratureSpec = FINE_QUAD) -> float:
    """F_rho(phi) for theta = (cos phi, sin phi)."""
    alpha = 1.0 / p
    a, b = math.cos(phi), math.sin(phi)
    r2 = rho * rho

    def u(x1):
        return (1.0 - x1**p) ** alpha

    def psi(z):
        z = min(max(z, -rho), rho)
        return r2 * z - z**3 / 3.0

    if abs(b) < 1e-12:
        def inner(x1):
            return 2.0 * u(x1) * max(r2 - (a * x1) ** 2, 0.0)
        kinks = _grid_roots(lambda x1: a * x1 - rho, 0.0, 1.0)
    else:
        def inner(x1):
            w = u(x1)
            return (psi(a * x1 + b * w) - psi(a * x1 - b * w)) / b
        kinks = []
        for sgn, lev in ((1.0, rho), (-1.0, rho), (-1.0, -rho)):
            kinks += _grid_roots(lambda x1, s=sgn, l=lev: a * x1 + s * b * u(x1) - l, 0.0, 1.0)
    # the integrand is even in x1 (x -> -x maps the body to itself)
    val, _ = integrate_adaptive(inner, 0.0, 1.0, spec, points=sorted(kinks))
    return 2.0 * val


def boundary_derivative(p: float, phi: float, rho: float, spec: QuadratureSpec = FINE_QUAD) -> float:
    """-F_rho'(phi) from the boundary identity (theta of unit norm)."""
    alpha = 1.0 / p
    a, b = math.cos(phi), math.sin(phi)
    if a <= 0 or b > a + 1e-15:
        raise DomainError("the boundary identity needs 0 <= phi <= pi/4")
    bb, ell = b / a, rho / a

    def xy(t):
        return t**alpha, (1.0 - t) ** alpha

    def integrand(t):
        x, y = xy(t)
        weight = (1.0 - t) ** (2 * alpha - 1) - t ** (2 * alpha - 1)
        return weight * (q_ell(ell, bb, x, y) - q_ell(ell, bb, y, x))

    kinks = []
    for f in (lambda t: bb * xy(t)[1] - xy(t)[0], lambda t: bb * xy(t)[1] + xy(t)[0],
              lambda t: bb * xy(t)[0] - xy(t)[1], lambda t: bb * xy(t)[0] + xy(t)[1]):
        for lev in (ell, -ell):
            kinks += _grid_roots(lambda t, f=f, lev=lev: f(t) - lev, 0.0, 0.5)
    val, _ = integrate_adaptive(integrand, 0.0, 0.5, spec, points=sorted(kinks))
    return 2.0 * a * a * alpha * val


def fd_derivative(p: float, phi: float, rho: float, h: float = 2e-3,
                  spec: QuadratureSpec = FINE_QUAD) -> float:
    """F_rho'(phi) by a five-point central stencil (F is even about 0 and pi/4)."""
    f = [stop_loss_2d(p, phi + k * h, rho, spec) for k in (-2, -1, 1, 2)]
    return (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12.0 * h)


@dataclass
class BaseCaseReport:
    p: float
    rho: float
    phi_grid: np.ndarray
    values: np.ndarray        # F_rho(phi)
    neg_derivative: np.ndarray  # -F' from the boundary identity
    fd_neg_derivative: np.ndarray
    tol: float

    @property
    def nonincreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) <= self.tol))

    @property
    def identity_nonnegative(self) -> bool:
        return bool(np.all(self.neg_derivative >= -self.tol))

    @property
    def route_gap(self) -> float:
        return float(np.max(np.abs(self.neg_derivative - self.fd_neg_derivative)))

    def holds(self, consistency: float = 1e-6) -> bool:
        return self.nonincreasing and self.identity_nonnegative and self.route_gap <= consistency


def base_case_check(p: float, phi_grid: Sequence[float] | None = None, rho: float = 0.5,
                    spec: QuadratureSpec = FINE_QUAD, tol: float = 1e-10) -> BaseCaseReport:
    """F_rho nonincreasing on the grid, -F' >= 0, and the two derivative routes agree."""
    _check_p(p)
    if not rho > 0:
        raise DomainError("rho must be > 0")
    grid = (np.linspace(0.0, math.pi / 4, 5) if phi_grid is None
            else np.asarray(phi_grid, dtype=float))
    if np.any(grid < 0) or np.any(grid > math.pi / 4 + 1e-15):
        raise DomainError("phi grid must lie in [0, pi/4]")
    values = np.array([stop_loss_2d(p, float(phi), rho, spec) for phi in grid])
    ident = np.array([boundary_derivative(p, float(min(phi, math.pi / 4)), rho, spec) for phi in grid])
    fd = np.array([-fd_derivative(p, float(phi), rho, spec=spec) for phi in grid])
    return BaseCaseReport(p, rho, grid, values, ident, fd, tol)
