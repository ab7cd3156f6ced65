"""Majorization, Robin-Hood chains, and stop-loss tests of convex order.

Convex order U <=cx V of nonnegative variables with equal means is checked
through the lower stop-loss transform a -> E(a - U)_+. Decisions are one-sided
confidence statements: a threshold counts against the order only when the
estimated excess exceeds 3 paired standard errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, UsageError
from .lp_model import BallParams, coordinate_moment
from .profile import (DEFAULT_BUDGET, Direction, crn_expectations, laplace_m_many,
                      upper_stop_loss_feature)
from .sampler import iter_ball_batches
from .scalar_math import RngStream, as_generator

ORDER_SE = 3.0
MEAN_SE = 4.0

CONSISTENT = "ConsistentWithOrder"
VIOLATION = "Violation"
INCONCLUSIVE = "Inconclusive"


def _as_simplex(s, name="vector") -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-d vector")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise DomainError(f"{name} must have finite nonnegative entries")
    return s


def majorizes(s, r, tol: float = 1e-12) -> bool:
    """True iff s majorizes r: equal totals, dominating partial sums of s sorted decreasingly."""
    s, r = _as_simplex(s, "s"), _as_simplex(r, "r")
    if s.size != r.size:
        raise DomainError("majorization needs vectors of equal length")
    if abs(s.sum() - r.sum()) > tol:
        raise DomainError("majorization needs equal totals")
    cs = np.cumsum(np.sort(s)[::-1])
    cr = np.cumsum(np.sort(r)[::-1])
    return bool(np.all(cs >= cr - tol))


def is_permutation_of(s, r, tol: float = 1e-12) -> bool:
    return bool(np.all(np.abs(np.sort(s) - np.sort(r)) <= tol))


def strictly_majorizes(s, r, tol: float = 1e-12) -> bool:
    return majorizes(s, r, tol) and not is_permutation_of(s, r, tol)


@dataclass(frozen=True)
class TTransfer:
    """Replace (s_i, s_j) by (lam s_i + (1-lam) s_j, lam s_j + (1-lam) s_i)."""

    i: int
    j: int
    lam: float

    def __post_init__(self):
        if self.i == self.j:
            raise DomainError("a T-transform needs two distinct indices")
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError("lambda must lie in [0, 1]")

    def apply(self, s) -> np.ndarray:
        out = np.array(s, dtype=float)
        a, b = out[self.i], out[self.j]
        out[self.i] = self.lam * a + (1.0 - self.lam) * b
        out[self.j] = self.lam * b + (1.0 - self.lam) * a
        return out


def replay(s, transfers: Sequence[TTransfer]) -> list[np.ndarray]:
    """All intermediate vectors, starting with s itself."""
    path = [np.array(s, dtype=float)]
    for tr in transfers:
        path.append(tr.apply(path[-1]))
    return path


def t_transform_chain(source, target, tol: float = 1e-12) -> list[TTransfer]:
    """At most n-1 Robin-Hood transfers taking ``source`` to ``target``.

    Classical construction: with both vectors sorted decreasingly, move
    mass from the last coordinate still above its target to the first later
    coordinate below its target, by the smaller of the two gaps. Each step
    fixes at least one coordinate.

    Indices refer to ``source`` as given. The replayed result equals
    ``target`` rearranged into the rank order of ``source`` (so exactly
    ``target`` when both share a rank order, e.g. both sorted).
    """
    source = _as_simplex(source, "source")
    target = _as_simplex(target, "target")
    if not majorizes(source, target, tol):
        raise DomainError("t_transform_chain needs source to majorize target")
    n = source.size
    order = np.argsort(-source, kind="stable")
    x = source[order].copy()
    y = np.sort(target)[::-1]
    eps = tol * max(1.0, float(np.abs(x).sum()))
    chain: list[TTransfer] = []
    for _ in range(n):
        d = x - y
        above = np.flatnonzero(d > eps)
        if above.size == 0:
            break
        j = int(above[-1])
        below = np.flatnonzero(d[j + 1:] < -eps)
        if below.size == 0:
            break
        k = j + 1 + int(below[0])
        delta = min(x[j] - y[j], y[k] - x[k])
        gap = x[j] - x[k]
        lam = min(1.0, max(0.0, 1.0 - delta / gap))
        chain.append(TTransfer(int(order[j]), int(order[k]), lam))
        x[j] -= delta
        x[k] += delta
        # snap the coordinate that reached its target
        if abs(x[j] - y[j]) <= eps:
            x[j] = y[j]
        if abs(x[k] - y[k]) <= eps:
            x[k] = y[k]
    return chain


def random_t_transforms(s, rng, steps: int, lam_range=(0.15, 0.85)) -> tuple[np.ndarray, list[TTransfer]]:
    """Apply ``steps`` random T-transforms; the result is majorized by s."""
    gen = as_generator(rng)
    s = np.array(s, dtype=float)
    n = s.size
    transfers = []
    for _ in range(steps):
        i, j = gen.choice(n, size=2, replace=False)
        tr = TTransfer(int(i), int(j), float(gen.uniform(*lam_range)))
        s = tr.apply(s)
        transfers.append(tr)
    return s, transfers


def stop_loss_curve(squared_samples, thresholds) -> tuple[np.ndarray, np.ndarray]:
    """Empirical mean and standard error of (a - u)_+ for each threshold a."""
    u = np.asarray(squared_samples, dtype=float).ravel()
    a = np.asarray(thresholds, dtype=float).ravel()
    if u.size == 0:
        raise UsageError("stop_loss_curve needs at least one sample")
    if np.any(a < 0):
        raise DomainError("thresholds must be nonnegative")
    if np.any(u < 0):
        raise DomainError("squared samples must be nonnegative")
    vals = np.maximum(a[None, :] - u[:, None], 0.0)
    means = vals.mean(axis=0)
    ses = vals.std(axis=0, ddof=1) / math.sqrt(u.size) if u.size > 1 else np.full(a.size, np.inf)
    return means, ses


@dataclass
class StopLossReport:
    thresholds: np.ndarray
    lhs: np.ndarray          # E(a - U)_+, U = <eta, X>^2
    rhs: np.ndarray          # E(a - V)_+, V = <theta, X>^2
    se: np.ndarray           # paired standard error of lhs - rhs
    verdict: str
    mean_u: float = float("nan")
    mean_v: float = float("nan")
    mean_se: float = float("nan")
    samples: int = 0
    raw_excess: np.ndarray | None = None

    @property
    def excess_in_se(self) -> np.ndarray:
        d = self.raw_excess if self.raw_excess is not None else self.lhs - self.rhs
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(self.se > 0, d / self.se, np.where(d > 0, np.inf, 0.0))
        return z


def default_grid() -> np.ndarray:
    return 0.05 * np.arange(41)


def convex_order_test(
    params: BallParams,
    theta: Direction,
    eta: Direction,
    grid=None,
    budget: int = DEFAULT_BUDGET,
    rng: RngStream | None = None,
    symmetry: str = "auto",
) -> StopLossReport:
    """Test <eta, X>^2 <=cx <theta, X>^2 on common random numbers.

    Both squared projections have mean v_{p,n}, so each lower stop-loss value
    is estimated as a - v + E(z - a)_+ (the exact mean as control variate).
    The order is contradicted at a threshold when lhs - rhs > 3 paired SE.
    """
    params.require_subcritical()
    if theta.n != params.n or eta.n != params.n:
        raise DomainError("direction length does not match n")
    if not majorizes(theta.squared, eta.squared, 1e-10):
        raise DomainError("convex_order_test needs s(theta) to majorize s(eta)")
    grid = default_grid() if grid is None else np.sort(np.asarray(grid, dtype=float).ravel())
    if np.any(grid < 0):
        raise DomainError("thresholds must be nonnegative")
    v = coordinate_moment(params, 2.0)
    funcs = [lambda z: z, upper_stop_loss_feature(grid)]
    k = 1 + grid.size
    acc = crn_expectations(params.p, params.n, [eta.vector, theta.vector], funcs, budget, rng,
                           symmetry, width=k)
    mean = acc.mean
    lhs_raw = grid - v + mean[1:k]
    rhs_raw = grid - v + mean[k + 1:2 * k]
    se = np.array([acc.se_diff(1 + i, k + 1 + i) for i in range(grid.size)])
    mean_u, mean_v = float(mean[0]), float(mean[k])
    mean_se = acc.se_diff(0, k)
    excess = lhs_raw - rhs_raw
    # reported curves are clipped to the feasible band [0, a]; decisions use raw values
    lhs = np.clip(lhs_raw, 0.0, grid)
    rhs = np.clip(rhs_raw, 0.0, grid)
    violated = np.any(excess > ORDER_SE * se + 1e-15)
    means_ok = abs(mean_u - mean_v) <= MEAN_SE * mean_se + 1e-15
    if violated:
        verdict = VIOLATION
    elif not means_ok:
        verdict = INCONCLUSIVE
    else:
        verdict = CONSISTENT
    report = StopLossReport(grid, lhs, rhs, se, verdict, mean_u, mean_v, mean_se, acc.count)
    report.raw_excess = excess
    return report


@dataclass
class SchurScanReport:
    t: float
    values: np.ndarray
    ses: np.ndarray
    gaps: np.ndarray
    gap_ses: np.ndarray
    failing_pairs: list = field(default_factory=list)
    samples: int = 0

    @property
    def margins(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(self.gap_ses > 0, self.gaps / self.gap_ses, np.inf * np.sign(self.gaps))

    @property
    def monotone(self) -> bool:
        return not self.failing_pairs


def schur_scan(
    params: BallParams,
    t: float,
    chain: Sequence[Direction],
    budget: int = DEFAULT_BUDGET,
    rng: RngStream | None = None,
    symmetry: str = "auto",
) -> SchurScanReport:
    """Check that M_{p,n,t} strictly decreases along a strict majorization chain."""
    params.require_subcritical()
    if not t > 0:
        raise DomainError("schur_scan needs t > 0")
    if len(chain) < 2:
        raise DomainError("a chain needs at least two directions")
    for a, b in zip(chain[:-1], chain[1:]):
        if a.n != params.n or b.n != params.n:
            raise DomainError("direction length does not match n")
        if not strictly_majorizes(a.squared, b.squared, 1e-10):
            raise DomainError("consecutive directions must be in strict majorization order")
    ests, acc = laplace_m_many(params, t, chain, budget, rng, symmetry)
    values = np.array([e.value for e in ests])
    ses = np.array([e.err for e in ests])
    gaps = values[:-1] - values[1:]
    gap_ses = np.array([acc.se_diff(i, i + 1) for i in range(len(chain) - 1)])
    failing = [(i, i + 1) for i in range(len(gaps)) if not gaps[i] > ORDER_SE * gap_ses[i]]
    return SchurScanReport(t, values, ses, gaps, gap_ses, failing, acc.count)


@dataclass
class CounterexampleReport:
    p: float
    n: int
    prob_exceed: float
    prob_se: float
    support_bound: float
    eta_stop_loss: float       # E(<eta, X>^2 - 1)_+
    eta_stop_loss_se: float
    coord_stop_loss: float     # E(<e_1, X>^2 - 1)_+, exactly zero
    samples: int

    @property
    def lower_3sigma(self) -> float:
        return self.prob_exceed - 3.0 * self.prob_se


def p_gt_2_counterexample(
    p: float, n: int = 2, budget: int = 10**7, rng: RngStream | None = None
) -> CounterexampleReport:
    """Show the convex order fails for p > 2 with theta = e_1, eta = (e_1 + e_2)/sqrt 2."""
    if not p > 2:
        raise DomainError("the counterexample needs p > 2")
    if int(n) != n or n < 2:
        raise DomainError("the counterexample needs n >= 2")
    rng = rng if rng is not None else RngStream(0)
    q = p / (p - 1.0)
    support = 2.0 ** (1.0 / q - 0.5)
    hits, count = 0, 0
    excess_parts, excess_sq_parts = [], []
    coord_excess = 0.0
    for x in iter_ball_batches(p, n, rng, budget):
        z = 0.5 * (x[:, 0] + x[:, 1]) ** 2
        hits += int(np.count_nonzero(z > 1.0))
        e = np.maximum(z - 1.0, 0.0)
        excess_parts.append(float(e.sum()))
        excess_sq_parts.append(float((e * e).sum()))
        coord_excess += float(np.maximum(x[:, 0] ** 2 - 1.0, 0.0).sum())
        count += x.shape[0]
    prob = hits / count
    prob_se = math.sqrt(prob * (1.0 - prob) / count)
    m1 = math.fsum(excess_parts) / count
    m2 = math.fsum(excess_sq_parts) / count
    ex_se = math.sqrt(max(m2 - m1 * m1, 0.0) / count)
    return CounterexampleReport(p, int(n), prob, prob_se, support, m1, ex_se, coord_excess / count, count)
