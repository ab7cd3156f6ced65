"""Monotonicity in t of the coordinate profile Phi_{p,n}(t) = A_tilde_{p,n,t}(e_1).

The sign of the fourth-cumulant excess Delta_{p,n} = m_4 - 3 v^2 decides the
picture: Delta >= 0 gives a strictly decreasing profile, Delta < 0 a profile
that decreases for small t and increases for large t. Writing W = X_1^2,

    S(lambda) = v E e^{-lambda W} - (1 + 2 v lambda) E W e^{-lambda W}
              = int_0^1 e^{-lambda w} dmu(w),

where the signed measure mu has density

    C w^{1/2} (1 - w^{p/2})^{m-1} [v (n-1) w^{p/2-1} - (1 - w^{p/2})],

m = (n-1)/p, and Phi'(t) has the sign of -S(1/(2t)). This module evaluates
those objects by quadrature and cross-checks the classification with finite
differences of the deterministic profile.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .errors import DomainError
from .lp_model import BallParams, MomentSet, coordinate_moment, density_normalizer, moment_set
from .profile import SQRT_2PI, coordinate_profile_phi
from .scalar_math import DEFAULT_QUAD, QuadratureSpec, integrate_adaptive, log_gamma

NONMONOTONE = "Nonmonotone"
DECREASING = "StrictlyDecreasing"

# quadrature used for finite differences of Phi
FD_QUAD = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12, max_subdivisions=200)


@dataclass(frozen=True)
class FlowClassification:
    params: BallParams
    delta: float
    big_r: float
    verdict: str
    witness: tuple[float, float] | None = None
    witness_slopes: tuple[float, float] | None = None


@dataclass
class SignedMeasureCheck:
    lambda_grid: np.ndarray
    s_values: np.ndarray
    s_errors: np.ndarray
    mu_sign_changes: int
    s0: float = float("nan")
    s_prime0: float = float("nan")  # S'(0) = -int w dmu
    delta: float = float("nan")

    @property
    def positive(self) -> bool:
        return bool(np.all(self.s_values > self.s_errors))


# ---------------------------------------------------------------------------
# Kurtosis ratio and thresholds
# ---------------------------------------------------------------------------


def kurtosis_ratio(p: float, n: int) -> float:
    """R_{p,n} = m_4 / v^2."""
    return moment_set(BallParams(p, n)).big_r


def r_limit(p: float) -> float:
    """R_{p,inf} = Gamma(5/p) Gamma(1/p) / Gamma(3/p)^2."""
    if not 1.0 <= p <= 2.0:
        raise DomainError(f"p must lie in [1, 2], got {p!r}")
    return math.exp(log_gamma(5.0 / p) + log_gamma(1.0 / p) - 2.0 * log_gamma(3.0 / p))


def threshold_n(p: float, n_max: int = 100_000) -> int:
    """N(p) = min{n >= 2 : R_{p,n} >= 3}.

    R_{p,n} increases in n towards R_{p,inf} > 3, so the first hit of an
    increasing scan is the answer.
    """
    if not 1.0 <= p < 2.0:
        raise DomainError(f"threshold_n needs 1 <= p < 2, got {p!r}")
    for n in range(2, n_max + 1):
        if kurtosis_ratio(p, n) >= 3.0:
            return n
    raise DomainError(f"no threshold found below n = {n_max} for p = {p!r}")


# ---------------------------------------------------------------------------
# Signed measure
# ---------------------------------------------------------------------------


def mu_bracket(params: BallParams, w) -> np.ndarray:
    """v (n-1) w^{p/2-1} - (1 - w^{p/2}); the sign of the mu-density on (0, 1)."""
    p, n = params.p, params.n
    v = coordinate_moment(params, 2.0)
    w = np.asarray(w, dtype=float)
    return v * (n - 1) * w ** (p / 2 - 1) - (1.0 - w ** (p / 2))


def mu_density(params: BallParams, w) -> np.ndarray:
    p, n = params.p, params.n
    m = (n - 1) / p
    c = density_normalizer(params)
    w = np.asarray(w, dtype=float)
    return c * np.sqrt(w) * (1.0 - w ** (p / 2)) ** (m - 1) * mu_bracket(params, w)


def count_sign_changes(values) -> int:
    s = np.sign(np.asarray(values, dtype=float))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def mu_sign_changes(params: BallParams, points: int = 4001) -> int:
    """Sign changes of the mu-density on (0, 1).

    For p close to 2 the positive lobe at the origin sits at w far below
    double-precision resolution of w itself, so the sign is evaluated as
    log r(u) - log(1 / (v (n-1))) with u = w^{p/2} = logistic(x) and
    log u, log(1 - u) computed directly from x on [-700, 40].
    """
    p, n = params.p, params.n
    q = p / 2.0
    v = coordinate_moment(params, 2.0)
    x = np.linspace(-700.0, 40.0, points)
    log_u = -np.logaddexp(0.0, -x)
    log_1mu = -np.logaddexp(0.0, x)
    log_r = (q - 1.0) / q * log_u - log_1mu
    return count_sign_changes(log_r + math.log(v * (n - 1)))


def _pow_ratio(w: float, q: float) -> float:
    """(1 - w^q) / (1 - w), stable as w -> 1."""
    if w <= 0.0:
        return 1.0
    lw = math.log(w)
    if lw == 0.0:
        return q
    return math.expm1(q * lw) / math.expm1(lw)


def _beta_integral(f, a: float, b: float, lam: float, spec: QuadratureSpec) -> tuple[float, float]:
    """int_0^1 w^a (1-w)^b f(w) dw for smooth f; endpoint powers go to QUADPACK's weight.

    The range is split at c = min(1/2, 30/lambda) so the e^{-lambda w}
    concentration near 0 is resolved on its own piece.
    """
    c = 0.5 if lam <= 60.0 else 30.0 / lam
    left, e1 = integrate_adaptive(lambda w: (1.0 - w) ** b * f(w), 0.0, c, spec,
                                  weight="alg", wvar=(a, 0.0))
    right, e2 = integrate_adaptive(lambda w: w**a * f(w), c, 1.0, spec, weight="alg", wvar=(0.0, b))
    return left + right, e1 + e2


def mu_transform(params: BallParams, lam: float, moment: int = 0,
                 spec: QuadratureSpec = DEFAULT_QUAD) -> tuple[float, float]:
    """int_0^1 w^moment e^{-lambda w} dmu(w), returned as (value, err).

    The density is split into its two bracket terms, each a Beta-type
    integrand; the factor (1 - w^{p/2})^{power} is written as
    (1 - w)^{power} times a smooth ratio.
    """
    p, n = params.p, params.n
    if n < 2:
        raise DomainError("the signed measure needs n >= 2")
    m = (n - 1) / p
    c = density_normalizer(params)
    v = coordinate_moment(params, 2.0)
    q = p / 2.0

    def smooth(power):
        return lambda w: _pow_ratio(w, q) ** power * math.exp(-lam * w) * w**moment

    t1, e1 = _beta_integral(smooth(m - 1.0), (p - 1.0) / 2.0, m - 1.0, lam, spec)
    t2, e2 = _beta_integral(smooth(m), 0.5, m, lam, spec)
    scale = c
    return scale * (v * (n - 1) * t1 - t2), scale * (v * (n - 1) * e1 + e2)


def s_function_direct(params: BallParams, lam: float, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """S(lambda) = v E e^{-lambda W} - (1 + 2 v lambda) E W e^{-lambda W}, from the law of W."""
    p, n = params.p, params.n
    m = (n - 1) / p
    c = density_normalizer(params)
    v = coordinate_moment(params, 2.0)
    q = p / 2.0

    def f(power):
        return lambda w: _pow_ratio(w, q) ** m * math.exp(-lam * w) * w**power

    el, _ = _beta_integral(f(0), -0.5, m, lam, spec)
    ew, _ = _beta_integral(f(1), -0.5, m, lam, spec)
    return c * (v * el - (1.0 + 2.0 * v * lam) * ew)


def s_positivity(params: BallParams, lambda_grid: Sequence[float] | None = None,
                 spec: QuadratureSpec = DEFAULT_QUAD) -> SignedMeasureCheck:
    """Evaluate S on a lambda grid and the identities S(0) = 0, S'(0) = Delta."""
    params.require_subcritical()
    if params.n < 2:
        raise DomainError("s_positivity needs n >= 2")
    grid = np.logspace(-2, 3, 11) if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    if np.any(grid <= 0):
        raise DomainError("lambda grid must be positive")
    vals, errs = [], []
    for lam in grid:
        val, err = mu_transform(params, float(lam), 0, spec)
        vals.append(val)
        errs.append(err)
    s0, _ = mu_transform(params, 0.0, 0, spec)
    first, _ = mu_transform(params, 0.0, 1, spec)
    ms = moment_set(params)
    return SignedMeasureCheck(grid, np.array(vals), np.array(errs), mu_sign_changes(params),
                              s0, -first, ms.delta)


def bracket_min_check(p: float, tol: float = 1e-8) -> float:
    """argmin over (0,1) of r(w) = w^{p/2-1} / (1 - w^{p/2}).

    The minimizer satisfies w^{p/2} = 1 - p/2; raises when the numerical
    minimizer misses that relation by more than ``tol``.
    """
    if not 1.0 < p < 2.0:
        raise DomainError(f"bracket_min_check needs 1 < p < 2, got {p!r}")
    q = p / 2.0

    # in u = w^{p/2}, log r = ((q-1)/q) log u - log(1-u) is strictly convex;
    # its stationary point is located by root finding on the derivative
    def d_log_r(u):
        return (q - 1.0) / (q * u) + 1.0 / (1.0 - u)

    u = float(optimize.brentq(d_log_r, 1e-300, 1.0 - 1e-16, xtol=1e-16, rtol=4 * np.finfo(float).eps))
    if abs(u - (1.0 - q)) > tol:
        raise DomainError(f"argmin relation off by {abs(u - (1.0 - q)):.3e}")
    return u ** (1.0 / q)


# ---------------------------------------------------------------------------
# Derivative scans of Phi
# ---------------------------------------------------------------------------


def phi_value(params: BallParams, t: float, spec: QuadratureSpec = FD_QUAD) -> float:
    return coordinate_profile_phi(params, t, spec).value


def phi_derivative(params: BallParams, t: float, rel_step: float = 0.01,
                   spec: QuadratureSpec = FD_QUAD) -> float:
    """Phi'(t) by central differences with step t*rel_step and one Richardson step."""
    if not t > 0:
        raise DomainError("phi_derivative needs t > 0")
    h = t * rel_step

    def central(step):
        return (phi_value(params, t + step, spec) - phi_value(params, t - step, spec)) / (2.0 * step)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def derivative_scan(params: BallParams, t_grid: Sequence[float] | None = None,
                    spec: QuadratureSpec = FD_QUAD) -> tuple[np.ndarray, np.ndarray]:
    grid = np.logspace(-3, 3, 31) if t_grid is None else np.asarray(t_grid, dtype=float)
    return grid, np.array([phi_derivative(params, float(t), spec=spec) for t in grid])


def find_witness(params: BallParams, t_grid: Sequence[float] | None = None,
                 bisections: int = 6, spec: QuadratureSpec = FD_QUAD):
    """A pair t1 < t2 with Phi'(t1) < 0 < Phi'(t2), or None.

    Scans a log grid for the first negative-to-positive change of Phi' and
    tightens the bracket by a few bisections in log t. The bracket is kept
    away from the crossing so both slopes stay far above the
    finite-difference noise; they are re-checked with a halved step.
    """
    grid, d = derivative_scan(params, np.logspace(-4, 4, 41) if t_grid is None else t_grid, spec)
    for i in range(len(grid) - 1):
        if d[i] < 0 < d[i + 1]:
            lo, hi, dlo, dhi = grid[i], grid[i + 1], d[i], d[i + 1]
            for _ in range(bisections):
                mid = math.sqrt(lo * hi)
                dm = phi_derivative(params, mid, spec=spec)
                if dm < 0:
                    lo, dlo = mid, dm
                elif dm > 0:
                    hi, dhi = mid, dm
                else:
                    break
            if phi_derivative(params, lo, 0.005, spec) < 0 < phi_derivative(params, hi, 0.005, spec):
                return (float(lo), float(hi)), (float(dlo), float(dhi))
    return None


def classify(params: BallParams, spec: QuadratureSpec = FD_QUAD) -> FlowClassification:
    """Nonmonotone iff Delta < 0; a witness pair is attached in that case."""
    params.require_subcritical()
    if params.n < 2:
        raise DomainError("classify needs n >= 2")
    ms: MomentSet = moment_set(params)
    if ms.delta >= 0:
        return FlowClassification(params, ms.delta, ms.big_r, DECREASING)
    found = find_witness(params, spec=spec)
    if found is None:
        raise DomainError(f"no sign change of Phi' located for {params}")
    witness, slopes = found
    return FlowClassification(params, ms.delta, ms.big_r, NONMONOTONE, witness, slopes)


# ---------------------------------------------------------------------------
# Asymptotics
# ---------------------------------------------------------------------------


def abs_normal_moment(p: float) -> float:
    """E|Z|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)."""
    return math.exp(0.5 * p * math.log(2.0) + log_gamma((p + 1.0) / 2.0)) / math.sqrt(math.pi)


def small_time_slope_target(params: BallParams) -> float:
    """-((n-1)/p) E|Z|^p, the t^{p/2} coefficient of Phi/(C sqrt v) - 1."""
    return -((params.n - 1) / params.p) * abs_normal_moment(params.p)


@dataclass
class SmallTimeFit:
    t_grid: np.ndarray
    y: np.ndarray
    slope: float          # coefficient of t^{p/2} in y ~ a t^{p/2} + b t
    linear_coef: float
    naive_slope: float    # least squares of y on t^{p/2} alone
    target: float

    @property
    def relative_error(self) -> float:
        return abs(self.slope / self.target - 1.0)


def small_time_fit(params: BallParams, t_grid: Sequence[float] | None = None,
                   spec: QuadratureSpec = FD_QUAD) -> SmallTimeFit:
    """Fit Phi(t)/(C sqrt v) - 1 on small t.

    The remainder after the t^{p/2} term is O(t) (mostly from
    sqrt(1 + t/v)), which is not negligible at t ~ 1e-4 when p > 1, so the
    fit carries a linear term alongside t^{p/2}.
    """
    grid = np.logspace(-5, -4, 12) if t_grid is None else np.asarray(t_grid, dtype=float)
    c = density_normalizer(params)
    v = coordinate_moment(params, 2.0)
    y = np.array([phi_value(params, float(t), spec) for t in grid]) / (c * math.sqrt(v)) - 1.0
    x1 = grid ** (params.p / 2.0)
    design = np.column_stack([x1, grid])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    naive = float(x1 @ y / (x1 @ x1))
    return SmallTimeFit(grid, y, float(a), float(b), naive, small_time_slope_target(params))


def large_time_approx(params: BallParams, t: float) -> float:
    """(1 + Delta / (8 t^2)) / sqrt(2 pi)."""
    return (1.0 + moment_set(params).delta / (8.0 * t * t)) / SQRT_2PI


@dataclass
class RMonotonicity:
    p: float
    values: np.ndarray
    min_increment: float
    limit: float


def r_monotonicity(p: float, n_max: int = 200) -> RMonotonicity:
    vals = np.array([kurtosis_ratio(p, n) for n in range(1, n_max + 1)])
    return RMonotonicity(p, vals, float(np.min(np.diff(vals))), r_limit(p))
