"""Endpoint constants of the canonical chain at t = 0.

The generalized Gaussian g_p(x) = exp(-|x|^p) / (2 Gamma(1 + 1/p)) has the
real characteristic function phi_p, and the density at zero of the
normalized sum (Z_1 + ... + Z_k)/sqrt(k) of iid copies is

    b_{p,k} = (sqrt(k) / pi) * int_0^inf phi_p(xi)^k dxi.

The central profile of B_p^n at t = 0 in the direction u^(k) factorizes as a
gamma ratio times b_{p,k}. For p = 1 everything is explicit, which gives an
independent route for the Fourier quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError
from .lp_model import BallParams
from .order_lab import ORDER_SE, schur_scan
from .profile import DEFAULT_BUDGET, Direction
from .sampler import gen_gaussian_density_at_zero
from .scalar_math import DEFAULT_QUAD, QuadratureSpec, RngStream, integrate_adaptive, log_gamma

# exp(-x^p) < 1e-17 for x^p > 40, so phi_p is integrated on [0, 40^{1/p}]
_MASS_CUTOFF = 40.0


@dataclass(frozen=True)
class EndpointConstants:
    p: float
    k: int
    b: float
    s_section: float
    method: str  # "Fourier" | "ClosedForm" | "MonteCarlo"
    err: float = 0.0


def _check_p(p: float):
    if not 1.0 <= p <= 2.0:
        raise DomainError(f"p must lie in [1, 2], got {p!r}")


def _inner_spec(spec: QuadratureSpec) -> QuadratureSpec:
    # phi_p is raised to the k-th power and integrated over a long range, so
    # each node is resolved well below the outer tolerance
    return QuadratureSpec(abs_tol=spec.abs_tol * 1e-2, rel_tol=min(spec.rel_tol, 1e-12),
                          max_subdivisions=max(500, spec.max_subdivisions))


def gen_gaussian_at_zero(p: float) -> float:
    """g_p(0) = 1 / (2 Gamma(1 + 1/p))."""
    _check_p(p)
    return gen_gaussian_density_at_zero(p)


def _phi_with_err(p: float, xi: float, spec: QuadratureSpec) -> tuple[float, float]:
    if xi == 0.0:
        return 1.0, 0.0
    xi = abs(xi)
    scale = 2.0 * gen_gaussian_at_zero(p)
    upper = _MASS_CUTOFF ** (1.0 / p)
    val, err = integrate_adaptive(lambda x: math.exp(-(x**p)), 0.0, upper, spec,
                                  weight="cos", wvar=xi)
    return scale * val, scale * err


def char_fn_phi(p: float, xi: float, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """phi_p(xi) = 2 int_0^inf cos(xi x) g_p(x) dx, by QUADPACK's oscillatory rule."""
    _check_p(p)
    return _phi_with_err(p, float(xi), spec)[0]


def phi_envelope(p: float) -> float:
    """E with |phi_p(xi)| <= E / xi^2 for all xi > 0.

    Two integrations by parts give |phi_p(xi)| <= 2 (|g'(0+)| + TV(g')) / xi^2.
    For p = 1, g' jumps to -1/2 at 0 and then increases to 0, so E = 2.
    For p > 1, g'(0+) = 0 and g' has a single minimum at x^p = (p-1)/p,
    so TV(g') = 2 max|g'|.
    """
    _check_p(p)
    g0 = gen_gaussian_at_zero(p)
    if p == 1.0:
        return 4.0 * g0
    x_star = ((p - 1.0) / p) ** (1.0 / p)
    peak = g0 * p * x_star ** (p - 1.0) * math.exp(-(x_star**p))
    return 2.0 * (2.0 * peak)


def fourier_cutoff(p: float, k: int, tol: float) -> float:
    """Xi with int_Xi^inf (E/xi^2)^k dxi = E^k Xi^{1-2k} / (2k-1) <= tol (k >= 2)."""
    if k < 2:
        raise DomainError("the envelope tail is integrable only for k >= 2")
    e = phi_envelope(p)
    return max(1.0, (e**k / ((2 * k - 1) * tol)) ** (1.0 / (2 * k - 1)))


def section_from_b(p: float, k: int, b: float) -> float:
    """Invert b = Gamma(1 + (k-1)/p) S / (2 Gamma(1 + 1/p))^k for S."""
    log_s = math.log(b) + k * (math.log(2.0) + log_gamma(1.0 + 1.0 / p)) - log_gamma(1.0 + (k - 1) / p)
    return math.exp(log_s)


def b_constant(p: float, k: int, spec: QuadratureSpec = DEFAULT_QUAD) -> EndpointConstants:
    """b_{p,k} by Fourier quadrature, with a provable truncation of the tail.

    The outer integral runs to the cutoff from :func:`fourier_cutoff` and is
    split at 1, 2, 4, ... so the adaptive rule sees the peak at the origin.
    The reported error adds the outer quadrature estimate, the propagated
    error of the inner cosine transforms and the tail bound. For k = 1 the
    value is g_p(0) in closed form (the tail of phi_p is not integrable
    fast enough to truncate usefully).
    """
    _check_p(p)
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    if k == 1:
        b = gen_gaussian_at_zero(p)
        return EndpointConstants(p, 1, b, section_from_b(p, 1, b), "ClosedForm", 0.0)
    inner = _inner_spec(spec)
    cutoff = fourier_cutoff(p, k, spec.abs_tol)
    inner_err = [0.0]

    def integrand(xi):
        val, err = _phi_with_err(p, xi, inner)
        inner_err[0] = max(inner_err[0], err)
        return val**k

    breaks = []
    edge = 1.0
    while edge < cutoff:
        breaks.append(edge)
        edge *= 2.0
    outer = QuadratureSpec(spec.abs_tol, spec.rel_tol, max(spec.max_subdivisions, 200))
    val, err = integrate_adaptive(integrand, 0.0, cutoff, outer, points=breaks)
    tail = phi_envelope(p) ** k * cutoff ** (1 - 2 * k) / (2 * k - 1)
    # |phi^k - (phi + d)^k| <= k |d| for |phi| <= 1, integrated over the range
    propagated = k * inner_err[0] * cutoff
    scale = math.sqrt(k) / math.pi
    b = scale * val
    total_err = scale * (err + tail + propagated)
    return EndpointConstants(p, k, b, section_from_b(p, k, b), "Fourier", total_err)


def cross_polytope_b(k: int) -> float:
    """b_{1,k} = sqrt(k) binom(2k-2, k-1) / 2^{2k-1}."""
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    return math.sqrt(k) * math.comb(2 * k - 2, k - 1) / 2.0 ** (2 * k - 1)


def endpoint_prefactor(params: BallParams) -> float:
    """Gamma(1 + n/p) / Gamma(1 + (n-1)/p)."""
    p, n = params.p, params.n
    return math.exp(log_gamma(1.0 + n / p) - log_gamma(1.0 + (n - 1) / p))


def endpoint_a0(params: BallParams, k: int, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """A_{p,n,0}(u^(k)) = [Gamma(1+n/p) / Gamma(1+(n-1)/p)] b_{p,k}."""
    if int(k) != k or not 1 <= k <= params.n:
        raise DomainError(f"k must lie in [1, n={params.n}], got {k!r}")
    return endpoint_prefactor(params) * b_constant(params.p, int(k), spec).b


@dataclass(frozen=True)
class SurdValue:
    """Exact number ``rational * sqrt(radicand)``."""

    rational: Fraction
    radicand: int

    def __float__(self) -> float:
        return float(self.rational) * math.sqrt(self.radicand)

    def squared(self) -> Fraction:
        return self.rational**2 * self.radicand

    def __str__(self) -> str:
        if self.radicand == 1:
            return str(self.rational)
        return f"{self.rational}*sqrt({self.radicand})"


def cross_polytope_a0(n: int, k: int) -> SurdValue:
    """A_{1,n,0}(u^(k)) = n sqrt(k) binom(2k-2, k-1) / 2^{2k-1}, exactly."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if int(k) != k or not 1 <= k <= n:
        raise DomainError(f"k must lie in [1, n={n}], got {k!r}")
    n, k = int(n), int(k)
    # pull square factors out of sqrt(k) so the radicand is square-free
    outside, radicand = 1, k
    f = 2
    while f * f <= radicand:
        while radicand % (f * f) == 0:
            radicand //= f * f
            outside *= f
        f += 1
    coeff = Fraction(n * outside * math.comb(2 * k - 2, k - 1), 2 ** (2 * k - 1))
    return SurdValue(coeff, radicand)


@dataclass
class ChainReport:
    params: BallParams
    t: float
    values: np.ndarray
    errors: np.ndarray
    gaps: np.ndarray
    gap_errors: np.ndarray
    method: str
    samples: int = 0
    failing_pairs: list = field(default_factory=list)

    @property
    def decreasing(self) -> bool:
        return not self.failing_pairs

    @property
    def margins(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(self.gap_errors > 0, self.gaps / self.gap_errors, np.inf * np.sign(self.gaps))


def canonical_chain(n: int) -> list[Direction]:
    return [Direction.canonical(n, k) for k in range(1, n + 1)]


def chain_check(
    params: BallParams,
    t: float = 0.0,
    budget: int = DEFAULT_BUDGET,
    rng: RngStream | None = None,
    spec: QuadratureSpec = DEFAULT_QUAD,
    symmetry: str = "auto",
    ks: Sequence[int] | None = None,
) -> ChainReport:
    """Strict decrease of the central profile along u^(1), ..., u^(n).

    At t = 0 the values are :func:`endpoint_a0` and a gap must exceed ten
    times the combined quadrature error. At t > 0 the values are Monte Carlo
    estimates of M on common random numbers and a gap must exceed three
    paired standard errors.
    """
    params.require_subcritical()
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    n = params.n
    if t == 0:
        ks = list(range(1, n + 1)) if ks is None else [int(k) for k in ks]
        consts = [b_constant(params.p, k, spec) for k in ks]
        pref = endpoint_prefactor(params)
        values = np.array([pref * c.b for c in consts])
        errors = np.array([pref * c.err for c in consts])
        gaps = values[:-1] - values[1:]
        gap_errors = errors[:-1] + errors[1:]
        failing = [(i, i + 1) for i in range(len(gaps))
                   if not (gaps[i] > 0 and gaps[i] > 10.0 * gap_errors[i])]
        return ChainReport(params, 0.0, values, errors, gaps, gap_errors, "Fourier", 0, failing)
    if n < 2:
        raise DomainError("a positive-time chain needs n >= 2")
    report = schur_scan(params, t, canonical_chain(n), budget, rng, symmetry)
    failing = [(i, i + 1) for i in range(len(report.gaps))
               if not report.gaps[i] > ORDER_SE * report.gap_ses[i]]
    return ChainReport(params, float(t), report.values, report.ses, report.gaps, report.gap_ses,
                       "MonteCarlo", report.samples, failing)
