"""Closed-form constants of the uniform law on the l_p^n unit ball."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .scalar_math import log_gamma


@dataclass(frozen=True)
class BallParams:
    """(p, n) for B_p^n. p = 2 is admitted for sanity checks only."""

    p: float
    n: int
    alpha: float = field(init=False)

    def __post_init__(self):
        if not (1.0 <= self.p <= 2.0):
            raise DomainError(f"p must lie in [1, 2], got {self.p!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "alpha", 1.0 / self.p)

    def require_subcritical(self):
        """Guard for results that need p < 2 (strict chains, classification)."""
        if self.p >= 2.0:
            raise DomainError("this operation requires 1 <= p < 2")
        return self


@dataclass(frozen=True)
class MomentSet:
    volume: float
    v: float
    m4: float
    delta: float
    big_r: float
    c_norm: float


def log_ball_volume(p: float, n: int) -> float:
    return n * (math.log(2.0) + log_gamma(1.0 + 1.0 / p)) - log_gamma(1.0 + n / p)


def ball_volume(params: BallParams) -> float:
    """|B_p^n| = (2 Gamma(1 + 1/p))^n / Gamma(1 + n/p)."""
    return math.exp(log_ball_volume(params.p, params.n))


def coordinate_moment(params: BallParams, r: float) -> float:
    """E|X_1|^r for X uniform on B_p^n, r > -1."""
    if not r > -1:
        raise DomainError(f"coordinate moment needs r > -1, got {r!r}")
    p, n = params.p, params.n
    return math.exp(
        log_gamma(1 + n / p) + log_gamma((r + 1) / p)
        - log_gamma(1 / p) - log_gamma(1 + (n + r) / p)
    )


def density_normalizer(params: BallParams) -> float:
    """C_{p,n} = Gamma(1+n/p) / (2 Gamma(1+1/p) Gamma(1+(n-1)/p))."""
    p, n = params.p, params.n
    return math.exp(
        log_gamma(1 + n / p) - math.log(2.0) - log_gamma(1 + 1 / p) - log_gamma(1 + (n - 1) / p)
    )


def moment_set(params: BallParams) -> MomentSet:
    v = coordinate_moment(params, 2.0)
    m4 = coordinate_moment(params, 4.0)
    return MomentSet(
        volume=ball_volume(params),
        v=v,
        m4=m4,
        delta=m4 - 3.0 * v * v,
        big_r=m4 / (v * v),
        c_norm=density_normalizer(params),
    )


def coordinate_density(params: BallParams, u: float) -> float:
    """Marginal density of X_1: C_{p,n} (1 - |u|^p)_+^{(n-1)/p}."""
    a = abs(u)
    if a >= 1.0:
        return 0.0 if params.n > 1 else (density_normalizer(params) if a == 1.0 else 0.0)
    return density_normalizer(params) * (1.0 - a ** params.p) ** ((params.n - 1) / params.p)


def mixed_square_moment(params: BallParams) -> float:
    """E X_1^2 X_2^2 (n >= 2), from the Dirichlet(1, alpha, ..., alpha) moments."""
    if params.n < 2:
        raise DomainError("mixed moment needs n >= 2")
    a, n = params.alpha, params.n
    return math.exp(
        log_gamma(1 + n * a) - log_gamma(1 + n * a + 4 * a)
        + 2 * (log_gamma(3 * a) - log_gamma(a))
    )


def projection_fourth_moment(params: BallParams, theta) -> float:
    """E <theta, X>^4 for any theta (not necessarily unit)."""

    s = np.asarray(theta, dtype=float) ** 2
    m4 = coordinate_moment(params, 4.0)
    if params.n == 1:
        return m4 * float(s[0] ** 2)
    m22 = mixed_square_moment(params)
    total = float(s.sum())
    sum4 = float((s**2).sum())
    return m4 * sum4 + 3.0 * m22 * (total**2 - sum4)


def p1_mixed_fourth(n: int) -> tuple[Fraction, Fraction]:
    """Exact (E X_i^4, E X_i^2 X_j^2) for the cross-polytope B_1^n."""
    if int(n) != n or n < 2:
        raise DomainError("p1_mixed_fourth needs an integer n >= 2")
    denom = (n + 1) * (n + 2) * (n + 3) * (n + 4)
    return Fraction(24, denom), Fraction(4, denom)


def p1_variance(n: int) -> Fraction:
    """Exact v_{1,n} = 2 / ((n+1)(n+2))."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    return Fraction(2, (n + 1) * (n + 2))
