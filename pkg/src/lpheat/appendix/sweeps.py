"""Randomized scenario sweeps over the appendix checks.

Each sweep draws its scenarios from one RNG stream up front and then
evaluates them, optionally on a thread pool. Scenario order, and so the
report, does not depend on the number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ..scalar_math import DEFAULT_QUAD, QuadratureSpec, RngStream, as_generator
from .base_case import base_case_check, two_interval_check
from .layers import LayerScenario, dlt_check, wcl_check
from .polynomials import verify_poly_inequality

DLT_ROUTE_TOL = 1e-9
BASE_CASE_TOL = 1e-6


def _map(fn: Callable, items: Sequence, threads: int = 1) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def random_wcl_scenarios(count: int, rng=None) -> list[LayerScenario]:
    """alpha in (0.55, 0.95), delta in [3 alpha, 3 alpha + 4], B and L in (0, 3]."""
    gen = as_generator(rng if rng is not None else RngStream(0))
    out = []
    for _ in range(count):
        alpha = gen.uniform(0.55, 0.95)
        delta = 3.0 * alpha + gen.uniform(0.0, 4.0)
        b = 3.0 * (1.0 - gen.random())   # (0, 3]
        level = 3.0 * (1.0 - gen.random())
        out.append(LayerScenario(float(alpha), float(delta), float(b), float(level)))
    return out


def random_dlt_inputs(count: int, rng=None) -> list[tuple[float, float, float, float]]:
    """(alpha, beta, A, x) with beta in [1 + 2 alpha, 4 + 2 alpha], A in [0, 3], x in (0, 3]."""
    gen = as_generator(rng if rng is not None else RngStream(1))
    out = []
    for _ in range(count):
        alpha = gen.uniform(0.55, 0.95)
        beta = 1.0 + 2.0 * alpha + gen.uniform(0.0, 3.0)
        a_coef = gen.uniform(0.0, 3.0)
        x = 3.0 * (1.0 - gen.random())
        out.append((float(alpha), float(beta), float(a_coef), float(x)))
    return out


@dataclass
class SweepReport:
    name: str
    count: int
    failures: list = field(default_factory=list)
    min_slack: float = math.inf
    max_route_gap: float = 0.0

    @property
    def holds(self) -> bool:
        return not self.failures


def wcl_sweep(count: int = 200, rng=None, spec: QuadratureSpec = DEFAULT_QUAD,
              threads: int = 1) -> SweepReport:
    scenarios = random_wcl_scenarios(count, rng)
    reports = _map(lambda sc: wcl_check(sc, spec), scenarios, threads)
    out = SweepReport("wcl", count)
    for sc, rep in zip(scenarios, reports):
        out.min_slack = min(out.min_slack, rep.slack)
        if not rep.holds:
            out.failures.append((sc.alpha, sc.exponent, sc.coefficient, sc.level))
    return out


def dlt_sweep(count: int = 100, rng=None, spec: QuadratureSpec = DEFAULT_QUAD,
              threads: int = 1, route_tol: float = DLT_ROUTE_TOL) -> SweepReport:
    inputs = random_dlt_inputs(count, rng)
    reports = _map(lambda args: dlt_check(*args, spec=spec), inputs, threads)
    out = SweepReport("dlt", count)
    for args, rep in zip(inputs, reports):
        out.min_slack = min(out.min_slack, rep.lhs - rep.rhs)
        if not rep.degenerate:
            out.max_route_gap = max(out.max_route_gap, rep.route_gap)
        if not rep.holds or (not rep.degenerate and rep.route_gap > route_tol):
            out.failures.append(args)
    return out


def two_interval_sweep(count: int = 10_000, rng=None) -> SweepReport:
    """Exact Q_l(x, y) >= Q_l(y, x) on random dyadic rationals."""
    gen = as_generator(rng if rng is not None else RngStream(2))
    raw = gen.integers(0, 2**20, size=(count, 4))
    out = SweepReport("two_interval", count)
    scale = Fraction(1, 2**20)
    for ell_i, b_i, x_i, y_i in raw:
        x, y = sorted((int(x_i) * scale, int(y_i) * scale))
        rep = two_interval_check(2 * int(ell_i) * scale, int(b_i) * scale, x, y)
        out.min_slack = min(out.min_slack, float(rep.slack))
        if not rep.holds:
            out.failures.append((ell_i, b_i, x_i, y_i))
    return out


def base_case_sweep(ps: Sequence[float] = (1.2, 1.5, 1.8), rhos: Sequence[float] = (0.5,),
                    threads: int = 1, consistency: float = BASE_CASE_TOL) -> SweepReport:
    cases = [(p, rho) for p in ps for rho in rhos]
    reports = _map(lambda c: base_case_check(c[0], rho=c[1]), cases, threads)
    out = SweepReport("base_case", len(cases))
    for case, rep in zip(cases, reports):
        out.max_route_gap = max(out.max_route_gap, rep.route_gap)
        out.min_slack = min(out.min_slack, float(np.min(rep.neg_derivative)))
        if not rep.holds(consistency):
            out.failures.append(case)
    return out


@dataclass
class AppendixSummary:
    poly_holds: bool
    poly_min_value: float
    sweeps: list

    @property
    def holds(self) -> bool:
        return self.poly_holds and all(s.holds for s in self.sweeps)


def run_appendix_suite(seed: int = 0, wcl_count: int = 200, dlt_count: int = 100,
                       poly_samples: int = 100_000, two_interval_count: int = 10_000,
                       threads: int = 1) -> AppendixSummary:
    """Every appendix check at its default size, from independent substreams of one seed."""
    root = RngStream(seed)
    poly = verify_poly_inequality(poly_samples, root.substream(0))
    sweeps = [
        wcl_sweep(wcl_count, root.substream(1), threads=threads),
        dlt_sweep(dlt_count, root.substream(2), threads=threads),
        two_interval_sweep(two_interval_count, root.substream(3)),
        base_case_sweep(threads=threads),
    ]
    return AppendixSummary(poly.holds, poly.min_value, sweeps)
