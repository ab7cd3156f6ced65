"""Smoothed central profiles M, A and A-tilde of B_p^n.

For t > 0 the heat-flow identity gives, with X uniform on B_p^n,

    M(theta)       = E exp(-<X, theta>^2 / (2t))
    A(theta)       = M(theta) / sqrt(2 pi t)
    A_tilde(theta) = sqrt(1 + v/t) * M(theta) / sqrt(2 pi)

General directions are estimated by Monte Carlo; the coordinate direction
also has a deterministic one-dimensional quadrature route.

Monte Carlo estimators here are orbit-symmetrized: because the uniform law is
invariant under signed permutations, E f(<theta, X>^2) equals the mean over
the orbit {g theta} of the same expectation, and averaging f over the orbit
for every draw is an unbiased estimator with (much) smaller variance. All
directions in one call share the draws (common random numbers), so paired
differences carry small standard errors.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, UsageError
from .lp_model import BallParams, coordinate_moment, density_normalizer
from .sampler import iter_ball_batches
from .scalar_math import DEFAULT_QUAD, QuadratureSpec, RngStream, integrate_adaptive

DEFAULT_BUDGET = 10**6
ORBIT_LIMIT = 64
SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Direction:
    """Unit vector theta together with its squared coordinates s(theta)."""

    theta: tuple

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        if th.ndim != 1 or th.size == 0:
            raise DomainError("direction must be a non-empty vector")
        if abs(float(th @ th) - 1.0) > 1e-12:
            raise DomainError("direction must have unit Euclidean norm; use Direction.of()")
        object.__setattr__(self, "theta", tuple(float(x) for x in th))

    @classmethod
    def of(cls, vector) -> "Direction":
        v = np.asarray(vector, dtype=float)
        norm = float(np.linalg.norm(v))
        if not norm > 0 or not np.all(np.isfinite(v)):
            raise DomainError("cannot normalize a zero or non-finite vector")
        return cls(tuple(v / norm))

    @classmethod
    def coordinate(cls, n: int, i: int = 0) -> "Direction":
        v = np.zeros(n)
        v[i] = 1.0
        return cls(tuple(v))

    @classmethod
    def canonical(cls, n: int, k: int) -> "Direction":
        """u^(k): k equal nonzero coordinates followed by zeros."""
        if not 1 <= k <= n:
            raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
        v = np.zeros(n)
        v[:k] = 1.0 / math.sqrt(k)
        return cls(tuple(v))

    @classmethod
    def diagonal(cls, n: int) -> "Direction":
        return cls.canonical(n, n)

    @property
    def n(self) -> int:
        return len(self.theta)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.theta)

    @property
    def squared(self) -> np.ndarray:
        return np.array(self.theta) ** 2


@dataclass(frozen=True)
class ProfileEstimate:
    value: float
    err: float
    method: str  # "MonteCarlo" | "Quadrature"
    samples_or_panels: int


# ---------------------------------------------------------------------------
# Monte Carlo machinery
# ---------------------------------------------------------------------------


def orbit_size(theta: Sequence[float]) -> int:
    """Number of distinct signed rearrangements of theta, modulo a global sign."""
    mags = [abs(x) for x in theta]
    counts = Counter(mags)
    arrangements = math.factorial(len(mags))
    for c in counts.values():
        arrangements //= math.factorial(c)
    nnz = sum(1 for x in mags if x != 0.0)
    return arrangements * 2 ** max(nnz - 1, 0)


def direction_orbit(theta: Sequence[float], symmetry: str = "auto") -> np.ndarray:
    """Rows g*theta over the symmetry group used for averaging.

    ``symmetry``: "none" (theta itself, signed draws), "signs" (all sign
    flips), "full" (signed permutations), or "auto" (the largest of those with
    at most ORBIT_LIMIT rows). Orbits are taken modulo the global sign, which
    leaves <theta, x>^2 unchanged.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.size
    mode = resolve_symmetry(theta, symmetry)
    if mode == "none":
        return theta[None, :]
    mags = np.abs(theta)
    if mode == "full":
        arrangements = sorted(set(itertools.permutations(mags.tolist())))
    else:
        arrangements = [tuple(mags.tolist())]
    rows = []
    for arr in arrangements:
        arr = np.array(arr)
        nz = np.flatnonzero(arr)
        if nz.size == 0:
            rows.append(arr)
            continue
        for flips in itertools.product((1.0, -1.0), repeat=nz.size - 1):
            row = arr.copy()
            row[nz[1:]] *= np.array(flips)
            rows.append(row)
    return np.array(rows).reshape(-1, n)


def resolve_symmetry(theta, symmetry: str) -> str:
    if symmetry not in ("auto", "none", "signs", "full"):
        raise UsageError(f"unknown symmetry mode {symmetry!r}")
    if symmetry != "auto":
        return symmetry
    n = len(theta)
    if n <= 8 and orbit_size(theta) <= ORBIT_LIMIT:
        return "full"
    nnz = int(np.count_nonzero(theta))
    if 2 ** max(nnz - 1, 0) <= ORBIT_LIMIT:
        return "signs"
    return "none"


class MomentAccumulator:
    """Streaming mean/covariance of K per-sample quantities.

    Values are shifted by the first batch mean before accumulating second
    moments; batch partial sums are combined with ``math.fsum``.
    """

    def __init__(self, k: int):
        self.k = k
        self.count = 0
        self._shift = None
        self._sums: list[np.ndarray] = []
        self._cross = np.zeros((k, k))

    def add(self, values: np.ndarray):
        values = np.asarray(values, dtype=float).reshape(-1, self.k)
        if self._shift is None:
            self._shift = values.mean(axis=0)
        centered = values - self._shift
        self._sums.append(centered.sum(axis=0))
        self._cross += centered.T @ centered
        self.count += values.shape[0]

    def _centered_sum(self) -> np.ndarray:
        stacked = np.array(self._sums)
        return np.array([math.fsum(stacked[:, j]) for j in range(self.k)])

    @property
    def mean(self) -> np.ndarray:
        return self._shift + self._centered_sum() / self.count

    @property
    def cov(self) -> np.ndarray:
        s = self._centered_sum()
        n = self.count
        if n < 2:
            return np.full((self.k, self.k), np.inf)
        return (self._cross - np.outer(s, s) / n) / (n - 1)

    def se(self) -> np.ndarray:
        return np.sqrt(np.maximum(np.diag(self.cov), 0.0) / self.count)

    def se_combo(self, weights) -> float:
        w = np.asarray(weights, dtype=float)
        return math.sqrt(max(float(w @ self.cov @ w), 0.0) / self.count)

    def se_diff(self, i: int, j: int) -> float:
        w = np.zeros(self.k)
        w[i] += 1.0
        w[j] -= 1.0
        return self.se_combo(w)


def crn_expectations(
    p: float,
    n: int,
    directions: Sequence[Sequence[float]],
    funcs: Sequence[Callable[[np.ndarray], np.ndarray]],
    budget: int = DEFAULT_BUDGET,
    rng: RngStream | None = None,
    symmetry: str = "auto",
    width: int | None = None,
) -> MomentAccumulator:
    """E f(<theta, X>^2) for every (direction, f) pair on shared draws.

    Each ``f`` maps an (m, orbit) array of squared projections to an array of
    the same shape, or to shape (m, orbit, k) for a vector of k features.
    ``width`` is the total feature count over ``funcs`` (defaults to one per
    function). A function carrying ``reduces_orbit = True`` does the orbit
    averaging itself and returns shape (m, k). Columns of the returned
    accumulator are ordered direction-major.
    """
    if budget <= 0:
        raise UsageError("Monte Carlo budget must be positive")
    rng = rng if rng is not None else RngStream(0)
    dirs = [np.asarray(d, dtype=float) for d in directions]
    for d in dirs:
        if d.size != n:
            raise DomainError("direction length does not match n")
    width = len(funcs) if width is None else int(width)
    modes = {resolve_symmetry(d, symmetry) for d in dirs}
    signed = "none" in modes
    if signed:
        # one sign-carrying sample serves every direction; keep it unsymmetrized
        orbits = [d[None, :] for d in dirs]
    else:
        orbits = [direction_orbit(d, symmetry) for d in dirs]
    acc = MomentAccumulator(len(dirs) * width)
    largest = max(o.shape[0] for o in orbits) * max(1, width)
    batch = max(1024, min(1 << 18, (1 << 23) // largest))
    for x in iter_ball_batches(p, n, rng, budget, batch=batch, signed=signed):
        cols = []
        for orb in orbits:
            z = (x @ orb.T) ** 2
            for f in funcs:
                if getattr(f, "reduces_orbit", False):
                    cols.append(np.asarray(f(z)).reshape(x.shape[0], -1))
                else:
                    cols.append(f(z).mean(axis=1).reshape(x.shape[0], -1))
        acc.add(np.concatenate(cols, axis=1))
    return acc


def orbit_upper_stop_loss(z: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Row means over the orbit axis of (z - a)_+ for every threshold a.

    ``z`` has shape (m, orbit) and ``grid`` must be sorted increasingly.
    Each value is binned by the number of thresholds below it; per-row bin
    sums and counts, accumulated from the top bin down, give
    sum_{z > a_j} (z - a_j) in O(m * (orbit + len(grid))) work instead of
    the O(m * orbit * len(grid)) of direct broadcasting.
    """
    z = np.asarray(z, dtype=float)
    m, width = z.shape
    nbins = grid.size + 1
    k = np.searchsorted(grid, z, side="left")
    flat = (np.arange(m)[:, None] * nbins + k).ravel()
    sums = np.bincount(flat, weights=z.ravel(), minlength=m * nbins).reshape(m, nbins)
    counts = np.bincount(flat, minlength=m * nbins).reshape(m, nbins)
    above_sum = np.cumsum(sums[:, ::-1], axis=1)[:, ::-1][:, 1:]
    above_cnt = np.cumsum(counts[:, ::-1], axis=1)[:, ::-1][:, 1:]
    return (above_sum - above_cnt * grid) / width


def upper_stop_loss_feature(grid) -> Callable[[np.ndarray], np.ndarray]:
    """Orbit-reducing feature z -> mean_orbit (z - a)_+ for ``crn_expectations``."""
    grid = np.sort(np.asarray(grid, dtype=float))

    def feature(z):
        return orbit_upper_stop_loss(z, grid)

    feature.reduces_orbit = True
    return feature


def _check_t(t: float):
    if not t > 0:
        raise DomainError(f"smoothing time must be > 0, got {t!r}")


def _laplace_kernel(t: float):
    c = 1.0 / (2.0 * t)
    return lambda z: np.exp(-c * z)


def laplace_m(
    params: BallParams,
    t: float,
    direction: Direction,
    budget: int = DEFAULT_BUDGET,
    rng: RngStream | None = None,
    symmetry: str = "auto",
) -> ProfileEstimate:
    """Monte Carlo estimate of E exp(-<X, theta>^2 / (2t))."""
    _check_t(t)
    acc = crn_expectations(params.p, params.n, [direction.vector], [_laplace_kernel(t)],
                           budget, rng, symmetry)
    return ProfileEstimate(float(acc.mean[0]), float(acc.se()[0]), "MonteCarlo", acc.count)


def laplace_m_many(
    params: BallParams,
    t: float,
    directions: Sequence[Direction],
    budget: int = DEFAULT_BUDGET,
    rng: RngStream | None = None,
    symmetry: str = "auto",
) -> tuple[list[ProfileEstimate], MomentAccumulator]:
    """M for several directions on common random numbers.

    The accumulator is returned so callers can take paired standard errors
    (``acc.se_diff(i, j)``).
    """
    _check_t(t)
    acc = crn_expectations(params.p, params.n, [d.vector for d in directions],
                           [_laplace_kernel(t)], budget, rng, symmetry)
    se = acc.se()
    ests = [ProfileEstimate(float(m), float(s), "MonteCarlo", acc.count)
            for m, s in zip(acc.mean, se)]
    return ests, acc


def profile_a(params, t, direction, budget=DEFAULT_BUDGET, rng=None, symmetry="auto"):
    """Density at zero of <X + sqrt(t) G, theta>."""
    m = laplace_m(params, t, direction, budget, rng, symmetry)
    scale = 1.0 / math.sqrt(2.0 * math.pi * t)
    return ProfileEstimate(m.value * scale, m.err * scale, m.method, m.samples_or_panels)


def profile_a_tilde(params, t, direction, budget=DEFAULT_BUDGET, rng=None, symmetry="auto"):
    """Standard deviation times density at zero of the smoothed marginal."""
    m = laplace_m(params, t, direction, budget, rng, symmetry)
    v = coordinate_moment(params, 2.0)
    scale = math.sqrt(1.0 + v / t) / SQRT_2PI
    return ProfileEstimate(m.value * scale, m.err * scale, m.method, m.samples_or_panels)


# ---------------------------------------------------------------------------
# Coordinate direction by quadrature
# ---------------------------------------------------------------------------

_GAUSS_CUTOFF = 40.0  # exp(-y^2/2) < 1e-300 beyond


def _ratio_one_minus_pow(x: float, p: float) -> float:
    """(1 - x^p) / (1 - x) for 0 <= x <= 1, stable as x -> 1."""
    if x <= 0.0:
        return 1.0
    lx = math.log(x)
    if lx == 0.0:
        return p
    return math.expm1(p * lx) / math.expm1(lx)


def smoothed_coordinate_density(params: BallParams, t: float, spec: QuadratureSpec = DEFAULT_QUAD):
    """h_{p,n,t,e1}(0) = C E (1 - t^{p/2} |Z|^p)_+^{(n-1)/p}, Z standard normal.

    Returns (value, err). The Gaussian variable is integrated on
    [0, min(t^{-1/2}, 40)]; when the algebraic endpoint is inside that range
    its singular factor is handed to QUADPACK's algebraic-weight rule.
    """
    _check_t(t)
    p, n = params.p, params.n
    m = (n - 1) / p
    c = density_normalizer(params) * 2.0 / SQRT_2PI
    b = 1.0 / math.sqrt(t)
    if n == 1:
        val, err = integrate_adaptive(lambda y: math.exp(-0.5 * y * y), 0.0, min(b, _GAUSS_CUTOFF), spec)
        return c * val, c * err
    if b >= _GAUSS_CUTOFF:
        tp = t ** (p / 2.0)

        def f(y):
            return (1.0 - tp * y**p) ** m * math.exp(-0.5 * y * y)

        val, err = integrate_adaptive(f, 0.0, _GAUSS_CUTOFF, spec, points=[1.0, 4.0, 8.0])
        return c * val, c * err

    # (1 - (y/b)^p)^m = (1 - y/b)^m * ratio(y/b)^m ; weight (b - y)^m carries the singular part
    scale = b ** (-m)

    def g(y):
        x = y / b
        return scale * _ratio_one_minus_pow(x, p) ** m * math.exp(-0.5 * y * y)

    val, err = integrate_adaptive(g, 0.0, b, spec, weight="alg", wvar=(0.0, m))
    return c * val, c * err


def coordinate_profile_phi(params: BallParams, t: float, spec: QuadratureSpec = DEFAULT_QUAD) -> ProfileEstimate:
    """Phi_{p,n}(t) = A_tilde_{p,n,t}(e_1) by deterministic quadrature."""
    h, err = smoothed_coordinate_density(params, t, spec)
    v = coordinate_moment(params, 2.0)
    s = math.sqrt(v + t)
    return ProfileEstimate(s * h, s * err, "Quadrature", int(spec.max_subdivisions))
