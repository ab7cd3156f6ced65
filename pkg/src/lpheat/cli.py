"""Command-line front end.

Every subcommand writes one JSON document (default) or one CSV table. The
JSON document echoes the parsed configuration, carries a git-style content
hash of it, and wraps every number as ``{"value": x, "err": e}`` or
``{"value": x, "exact": true}``. CSV output has the columns
``index,value,err,method`` with one row per grid point or chain index.

Exit codes: 0 when the computation succeeds and every checked property
holds, 1 when a property is violated beyond its error bars, 2 for usage,
domain and convergence errors and for checks that stay inconclusive.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import __version__
from .errors import LpHeatError, UsageError
from .lp_model import BallParams, coordinate_moment, moment_set, p1_mixed_fourth, p1_variance
from .profile import DEFAULT_BUDGET, Direction
from .scalar_math import DEFAULT_QUAD, QuadratureSpec, RngStream

EXIT_OK, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2
SUBCOMMANDS = ("moments", "sample", "profile", "scan-schur", "convex-order", "chain",
               "classify", "threshold", "verify-appendix")
# relative rounding bound for closed forms built from a handful of lgamma calls
_CLOSED_FORM_REL = 64 * np.finfo(float).eps


# ---------------------------------------------------------------------------
# Output model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    """A number with either an error bar or an exactness marker."""

    value: Any
    err: float | None = None
    rational: str | None = None

    @classmethod
    def exact(cls, value, rational: Fraction | None = None) -> "Num":
        return cls(value, None, None if rational is None else str(rational))

    def err_or_zero(self) -> float:
        return 0.0 if self.err is None else self.err

    def to_json(self) -> dict:
        out = {"value": self.value}
        if self.err is None:
            out["exact"] = True
        else:
            out["err"] = self.err
        if self.rational is not None:
            out["rational"] = self.rational
        return out


def closed_form(value: float) -> Num:
    return Num(float(value), _CLOSED_FORM_REL * abs(float(value)))


@dataclass
class Row:
    index: str
    value: Num
    method: str


@dataclass
class Outcome:
    result: dict
    rows: list = field(default_factory=list)
    exit_code: int = EXIT_OK
    status: str = "ok"


def _plain(obj):
    """Turn Num, numpy scalars and tuples into JSON-ready values."""
    if isinstance(obj, Num):
        return _plain(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _dump(obj, out: io.StringIO, indent: int = 0):
    pad = "  " * indent
    if obj is None:
        out.write("null")
    elif isinstance(obj, bool):
        out.write("true" if obj else "false")
    elif isinstance(obj, int):
        out.write(str(obj))
    elif isinstance(obj, float):
        out.write(format(obj, ".17g") if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.write(_json_string(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.write(f"{pad}  {_json_string(k)}: ")
            _dump(v, out, indent + 1)
            out.write(",\n" if i < len(items) - 1 else "\n")
        out.write(pad + "}")
    elif isinstance(obj, list):
        if not obj:
            out.write("[]")
            return
        out.write("[\n")
        for i, v in enumerate(obj):
            out.write(pad + "  ")
            _dump(v, out, indent + 1)
            out.write(",\n" if i < len(obj) - 1 else "\n")
        out.write(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _json_string(s: str) -> str:
    return json.dumps(s)


def to_json(obj) -> str:
    """JSON text with floats at 17 significant digits and a trailing newline."""
    buf = io.StringIO()
    _dump(_plain(obj), buf)
    buf.write("\n")
    return buf.getvalue()


def content_hash(config: dict) -> str:
    """Git blob hash (sha1 of ``blob <len>\\0`` + body) of the canonical config JSON."""
    body = canonical_config(config).encode()
    return hashlib.sha1(b"blob %d\0" % len(body) + body).hexdigest()


def canonical_config(config: dict) -> str:
    """Sorted-key compact JSON; Python's shortest round-trip float repr keeps it stable."""
    return json.dumps(_plain(config), sort_keys=True, separators=(",", ":"))


def _fmt_float(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def to_csv(rows: Sequence[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "value", "err", "method"])
    for r in rows:
        err = 0.0 if r.value.err is None else r.value.err
        method = r.method if r.value.err is not None else f"{r.method}:exact"
        writer.writerow([r.index, _fmt_float(r.value.value), _fmt_float(err), method])
    return buf.getvalue()


def emit_report(command: str, config: dict, outcome: Outcome, fmt: str, out: str | None):
    """Render and write the report; raises OSError when ``out`` is unwritable."""
    if fmt == "csv":
        text = to_csv(outcome.rows)
    else:
        echo = {k: _wrap_config(v) for k, v in config.items()}
        doc = {
            "command": command,
            "version": __version__,
            "config": echo,
            "input_hash": content_hash(config),
            "status": outcome.status,
            "result": outcome.result,
            "rows": [{"index": r.index, "method": r.method, **r.value.to_json()} for r in outcome.rows],
        }
        text = to_json(doc)
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _wrap_config(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, float)):
        return Num.exact(v)
    if isinstance(v, (list, tuple)):
        return [_wrap_config(x) for x in v]
    return str(v)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def parse_direction(text: str, n: int) -> Direction:
    """e1, diag, u:k, or a comma-separated vector (normalized)."""
    t = text.strip()
    if t == "e1":
        return Direction.coordinate(n, 0)
    if t == "diag":
        return Direction.diagonal(n)
    if t.startswith("u:"):
        try:
            k = int(t[2:])
        except ValueError:
            raise UsageError(f"bad direction preset {text!r}") from None
        return Direction.canonical(n, k)
    try:
        vec = [float(x) for x in t.split(",")]
    except ValueError:
        raise UsageError(f"bad direction {text!r}: expected e1, diag, u:k or a vector") from None
    if len(vec) != n:
        raise UsageError(f"direction has {len(vec)} entries, expected n = {n}")
    return Direction.of(vec)


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def _finite_float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("must be finite")
    return v


def _p_value(text: str) -> float:
    """Accepts decimals and fractions such as 6/5."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid p {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=_p_value, help="exponent of the l_p ball (decimal or fraction)")
    common.add_argument("--n", type=_positive_int, help="dimension")
    common.add_argument("--t", type=_finite_float, help="smoothing time")
    common.add_argument("--k", type=_positive_int, help="chain length or canonical index")
    common.add_argument("--dir", help="direction theta: e1, diag, u:k or a comma-separated vector")
    common.add_argument("--eta", help="second direction for convex-order (default diag)")
    common.add_argument("--budget", type=_positive_int, help="Monte Carlo draws / sweep size")
    common.add_argument("--seed", type=_nonneg_int, default=0, help="RNG seed (default 0)")
    common.add_argument("--tol", type=_finite_float, help="absolute quadrature tolerance")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output path (default standard output)")
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads for sweeps (default: machine parallelism)")
    parser = argparse.ArgumentParser(
        prog="lpheat",
        description="Heat-flow central profiles of l_p balls: computations and verification sweeps.",
    )
    parser.add_argument("--version", action="version", version=f"lpheat {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", required=True)
    helps = {
        "moments": "volume and coordinate moments of B_p^n",
        "sample": "draw from B_p^n and compare empirical moments",
        "profile": "smoothed profiles M, A, A-tilde in one direction",
        "scan-schur": "Monte Carlo scan of M along the canonical chain at t > 0",
        "convex-order": "stop-loss test of <eta,X>^2 <=cx <theta,X>^2",
        "chain": "canonical chain of central profiles (t = 0 by Fourier quadrature)",
        "classify": "time monotonicity of the coordinate profile",
        "threshold": "smallest n with nonnegative Delta_{p,n}",
        "verify-appendix": "exact and randomized checks of the layer inequalities",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
    return parser


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs {', '.join(missing)}")


def _spec(args) -> QuadratureSpec:
    if args.tol is None:
        return DEFAULT_QUAD
    return QuadratureSpec(abs_tol=args.tol, rel_tol=DEFAULT_QUAD.rel_tol,
                          max_subdivisions=DEFAULT_QUAD.max_subdivisions)


def config_of(args) -> dict:
    """Parsed inputs that determine the output (``out`` and ``threads`` do not)."""
    keys = ("p", "n", "t", "k", "dir", "eta", "budget", "seed", "tol", "format")
    return {k: getattr(args, k) for k in keys if getattr(args, k) is not None}


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_moments(args) -> Outcome:
    _need(args, "p", "n")
    params = BallParams(args.p, args.n)
    ms = moment_set(params)
    fields = {"volume": closed_form(ms.volume), "v": closed_form(ms.v), "m4": closed_form(ms.m4),
              "delta": Num(ms.delta, _CLOSED_FORM_REL * (ms.m4 + 3 * ms.v * ms.v)),
              "R": closed_form(ms.big_r), "c_norm": closed_form(ms.c_norm)}
    if params.p == 1.0 and params.n >= 2:
        v = p1_variance(params.n)
        m4, _ = p1_mixed_fourth(params.n)
        d = m4 - 3 * v * v
        fields["v"] = Num.exact(float(v), v)
        fields["m4"] = Num.exact(float(m4), m4)
        fields["delta"] = Num.exact(float(d), d)
        fields["R"] = Num.exact(float(m4 / v**2), m4 / v**2)
    sign = "positive" if ms.delta > fields["delta"].err_or_zero() else (
        "negative" if ms.delta < -fields["delta"].err_or_zero() else "zero")
    result = dict(fields)
    result["delta_sign"] = sign
    rows = [Row(k, val, "Exact" if val.err is None else "ClosedForm") for k, val in fields.items()]
    return Outcome(result, rows)


def cmd_sample(args) -> Outcome:
    _need(args, "p", "n")
    from .sampler import iter_ball_batches

    params = BallParams(args.p, args.n)
    budget = args.budget or 100_000
    rng = RngStream(args.seed)
    s2 = s4 = s8 = 0.0
    norm_max = 0.0
    count = 0
    for x in iter_ball_batches(params.p, params.n, rng, budget):
        x2 = x * x
        s2 += float(x2.sum())
        s4 += float((x2 * x2).sum())
        s8 += float((x2**4).sum())
        norm_max = max(norm_max, float((np.abs(x) ** params.p).sum(axis=1).max()))
        count += x.shape[0]
    # coordinate means pooled over the n exchangeable coordinates; the SE
    # below ignores the within-row dependence and is only indicative
    tot = count * params.n
    v_hat, m4_hat = s2 / tot, s4 / tot
    v_se = math.sqrt(max(s4 / tot - v_hat**2, 0.0) / count)
    m4_se = math.sqrt(max(s8 / tot - m4_hat**2, 0.0) / count)
    v_exact, m4_exact = coordinate_moment(params, 2.0), coordinate_moment(params, 4.0)
    result = {
        "samples": Num.exact(count),
        "v_hat": Num(v_hat, v_se), "m4_hat": Num(m4_hat, m4_se),
        "v": closed_form(v_exact), "m4": closed_form(m4_exact),
        "max_norm_p": Num.exact(norm_max),
        "in_ball": norm_max <= 1.0 + 1e-12,
    }
    rows = [Row("v_hat", result["v_hat"], "MonteCarlo"), Row("m4_hat", result["m4_hat"], "MonteCarlo"),
            Row("v", result["v"], "ClosedForm"), Row("m4", result["m4"], "ClosedForm")]
    code = EXIT_OK if result["in_ball"] else EXIT_VIOLATION
    return Outcome(result, rows, code, "ok" if code == EXIT_OK else "violation")


def cmd_profile(args) -> Outcome:
    _need(args, "p", "n", "t")
    from .profile import SQRT_2PI, coordinate_profile_phi, laplace_m

    params = BallParams(args.p, args.n)
    theta = parse_direction(args.dir or "e1", params.n)
    m = laplace_m(params, args.t, theta, args.budget or DEFAULT_BUDGET, RngStream(args.seed))
    a_scale = 1.0 / math.sqrt(2.0 * math.pi * args.t)
    at_scale = math.sqrt(1.0 + coordinate_moment(params, 2.0) / args.t) / SQRT_2PI
    result = {
        "theta": [Num.exact(x) for x in theta.theta],
        "M": Num(m.value, m.err), "A": Num(m.value * a_scale, m.err * a_scale),
        "A_tilde": Num(m.value * at_scale, m.err * at_scale),
        "samples": Num.exact(m.samples_or_panels),
    }
    rows = [Row("M", result["M"], "MonteCarlo"), Row("A", result["A"], "MonteCarlo"),
            Row("A_tilde", result["A_tilde"], "MonteCarlo")]
    if int(np.count_nonzero(theta.vector)) == 1:
        phi = coordinate_profile_phi(params, args.t, _spec(args))
        result["A_tilde_quadrature"] = Num(phi.value, phi.err)
        rows.append(Row("A_tilde_quadrature", result["A_tilde_quadrature"], "Quadrature"))
    return Outcome(result, rows)


def _pair_verdict(gaps, ses, k_se=3.0) -> tuple[int, str]:
    """0 if every gap is significantly positive, 1 if one is significantly negative, else 2."""
    gaps, ses = np.asarray(gaps), np.asarray(ses)
    if np.any(gaps < -k_se * ses):
        return EXIT_VIOLATION, "violation"
    if np.all(gaps > k_se * ses):
        return EXIT_OK, "ok"
    return EXIT_ERROR, "inconclusive"


def cmd_scan_schur(args) -> Outcome:
    _need(args, "p", "n", "t")
    from .chain import canonical_chain
    from .order_lab import schur_scan

    params = BallParams(args.p, args.n)
    k_max = args.k or params.n
    chain = canonical_chain(params.n)[:k_max]
    rep = schur_scan(params, args.t, chain, args.budget or DEFAULT_BUDGET, RngStream(args.seed))
    code, status = _pair_verdict(rep.gaps, rep.gap_ses)
    rows = [Row(f"k={i + 1}", Num(float(v), float(s)), "MonteCarlo")
            for i, (v, s) in enumerate(zip(rep.values, rep.ses))]
    pairs = [{"pair": [i + 1, i + 2], "gap": Num(float(g), float(s)),
              "margin_se": Num.exact(float(g / s)) if s > 0 else None}
             for i, (g, s) in enumerate(zip(rep.gaps, rep.gap_ses))]
    result = {"t": Num.exact(rep.t), "samples": Num.exact(rep.samples), "pairs": pairs,
              "monotone": rep.monotone}
    return Outcome(result, rows, code, status)


def cmd_convex_order(args) -> Outcome:
    _need(args, "p", "n")
    from .order_lab import CONSISTENT, VIOLATION, convex_order_test, p_gt_2_counterexample

    budget = args.budget or DEFAULT_BUDGET
    if args.p > 2.0:
        if args.dir is not None or args.eta is not None:
            raise UsageError("for p > 2 only the e1 versus (e1+e2)/sqrt2 counterexample is available")
        rep = p_gt_2_counterexample(args.p, args.n, budget, RngStream(args.seed))
        violated = rep.lower_3sigma > 0
        result = {
            "prob_exceed": Num(rep.prob_exceed, rep.prob_se),
            "lower_3sigma": Num.exact(rep.lower_3sigma),
            "support_bound": closed_form(rep.support_bound),
            "eta_stop_loss": Num(rep.eta_stop_loss, rep.eta_stop_loss_se),
            "coord_stop_loss": Num.exact(rep.coord_stop_loss),
            "samples": Num.exact(rep.samples),
            "verdict": VIOLATION if violated else "Inconclusive",
        }
        rows = [Row("prob_exceed", result["prob_exceed"], "MonteCarlo"),
                Row("eta_stop_loss", result["eta_stop_loss"], "MonteCarlo")]
        return Outcome(result, rows, EXIT_VIOLATION if violated else EXIT_ERROR,
                       "violation" if violated else "inconclusive")
    params = BallParams(args.p, args.n)
    theta = parse_direction(args.dir or "e1", params.n)
    eta = parse_direction(args.eta or "diag", params.n)
    rep = convex_order_test(params, theta, eta, None, budget, RngStream(args.seed))
    excess = rep.raw_excess if rep.raw_excess is not None else rep.lhs - rep.rhs
    rows = [Row(f"a={float(a)!r}", Num(float(d), float(s)), "MonteCarlo")
            for a, d, s in zip(rep.thresholds, excess, rep.se)]
    result = {
        "theta": [Num.exact(x) for x in theta.theta], "eta": [Num.exact(x) for x in eta.theta],
        "verdict": rep.verdict,
        "mean_difference": Num(rep.mean_u - rep.mean_v, rep.mean_se),
        "max_excess_se": Num.exact(float(np.max(rep.excess_in_se))) if rep.thresholds.size else None,
        "samples": Num.exact(rep.samples),
    }
    if rep.verdict == CONSISTENT:
        return Outcome(result, rows)
    if rep.verdict == VIOLATION:
        return Outcome(result, rows, EXIT_VIOLATION, "violation")
    return Outcome(result, rows, EXIT_ERROR, "inconclusive")


def cmd_chain(args, threads: int) -> Outcome:
    _need(args, "p", "n")
    from .chain import b_constant, chain_check, endpoint_prefactor

    params = BallParams(args.p, args.n)
    t = 0.0 if args.t is None else args.t
    k_max = args.k or params.n
    if k_max > params.n:
        raise UsageError(f"--k must be at most n = {params.n}")
    ks = list(range(1, k_max + 1))
    if t == 0:
        spec = _spec(args)
        params.require_subcritical()
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            consts = list(pool.map(lambda k: b_constant(params.p, k, spec), ks))
        pref = endpoint_prefactor(params)
        values = np.array([pref * c.b for c in consts])
        errors = np.array([pref * c.err for c in consts])
        gaps, gap_err = values[:-1] - values[1:], errors[:-1] + errors[1:]
        code, status = _pair_verdict(gaps, gap_err, 10.0)
        rows = [Row(f"k={k}", Num(float(v), float(e)), c.method)
                for k, v, e, c in zip(ks, values, errors, consts)]
        result = {"t": Num.exact(0.0), "prefactor": closed_form(pref),
                  "b": [Num(c.b, c.err) for c in consts],
                  "gaps": [Num(float(g), float(e)) for g, e in zip(gaps, gap_err)],
                  "decreasing": status == "ok"}
        return Outcome(result, rows, code, status)
    rep = chain_check(params, t, args.budget or DEFAULT_BUDGET, RngStream(args.seed), ks=ks)
    if k_max < params.n:
        vals, errs = rep.values[:k_max], rep.errors[:k_max]
        gaps, gap_err = rep.gaps[:k_max - 1], rep.gap_errors[:k_max - 1]
    else:
        vals, errs, gaps, gap_err = rep.values, rep.errors, rep.gaps, rep.gap_errors
    code, status = _pair_verdict(gaps, gap_err, 3.0)
    rows = [Row(f"k={i + 1}", Num(float(v), float(e)), rep.method) for i, (v, e) in enumerate(zip(vals, errs))]
    result = {"t": Num.exact(t), "samples": Num.exact(rep.samples),
              "gaps": [Num(float(g), float(e)) for g, e in zip(gaps, gap_err)],
              "decreasing": status == "ok"}
    return Outcome(result, rows, code, status)


def cmd_classify(args) -> Outcome:
    _need(args, "p", "n")
    from .flow_classifier import DECREASING, classify, phi_derivative

    params = BallParams(args.p, args.n)
    fc = classify(params)
    result = {"delta": Num(fc.delta, _CLOSED_FORM_REL * abs(fc.delta) + 1e-300),
              "R": closed_form(fc.big_r), "verdict": fc.verdict}
    rows = []
    code, status = EXIT_OK, "ok"
    if fc.witness is not None:
        (t1, t2), (d1, d2) = fc.witness, fc.witness_slopes
        result["witness"] = {"t1": Num.exact(t1), "t2": Num.exact(t2),
                             "slope_t1": Num(d1, _fd_err(params, t1, d1)),
                             "slope_t2": Num(d2, _fd_err(params, t2, d2))}
        rows = [Row(f"t={t1!r}", result["witness"]["slope_t1"], "FiniteDifference"),
                Row(f"t={t2!r}", result["witness"]["slope_t2"], "FiniteDifference")]
    if fc.verdict == DECREASING:
        # an independent scan: a significantly positive slope would contradict the verdict
        grid = np.logspace(-3, 3, 13)
        for t in grid:
            d = phi_derivative(params, float(t))
            err = _fd_err(params, float(t), d)
            rows.append(Row(f"t={float(t)!r}", Num(d, err), "FiniteDifference"))
            if d > 3.0 * err:
                code, status = EXIT_VIOLATION, "violation"
    return Outcome(result, rows, code, status)


def _fd_err(params, t, d) -> float:
    from .flow_classifier import phi_derivative

    return abs(phi_derivative(params, t, 0.005) - d) + 1e-12


def cmd_threshold(args) -> Outcome:
    _need(args, "p")
    from .flow_classifier import threshold_n

    n = threshold_n(args.p)
    result = {"threshold": Num.exact(n)}
    return Outcome(result, [Row(f"p={args.p!r}", Num.exact(n), "Search")])


def cmd_verify_appendix(args, threads: int) -> Outcome:
    from .appendix.sweeps import run_appendix_suite

    samples = args.budget or 100_000
    summary = run_appendix_suite(args.seed, poly_samples=samples, threads=threads)
    result = {"poly_inequality": summary.poly_holds,
              "poly_min_value": Num.exact(summary.poly_min_value), "sweeps": {}}
    rows = [Row("poly_inequality", Num.exact(0 if summary.poly_holds else 1), "ExactRational")]
    for s in summary.sweeps:
        result["sweeps"][s.name] = {"count": Num.exact(s.count), "failures": Num.exact(len(s.failures)),
                                   "max_route_gap": Num.exact(s.max_route_gap), "holds": s.holds}
        rows.append(Row(s.name, Num.exact(len(s.failures)), "Sweep"))
    result["holds"] = summary.holds
    if summary.holds:
        return Outcome(result, rows)
    return Outcome(result, rows, EXIT_VIOLATION, "violation")


def dispatch(args) -> Outcome:
    threads = args.threads or os.cpu_count() or 1
    cmd = args.command
    if cmd == "moments":
        return cmd_moments(args)
    if cmd == "sample":
        return cmd_sample(args)
    if cmd == "profile":
        return cmd_profile(args)
    if cmd == "scan-schur":
        return cmd_scan_schur(args)
    if cmd == "convex-order":
        return cmd_convex_order(args)
    if cmd == "chain":
        return cmd_chain(args, threads)
    if cmd == "classify":
        return cmd_classify(args)
    if cmd == "threshold":
        return cmd_threshold(args)
    return cmd_verify_appendix(args, threads)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help/--version, 2 for usage errors
        return int(exc.code or 0)
    try:
        outcome = dispatch(args)
    except LpHeatError as exc:
        print(f"lpheat {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        emit_report(args.command, config_of(args), outcome, args.format, args.out)
    except OSError as exc:
        print(f"lpheat: cannot write output: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return outcome.exit_code


def main(argv: Sequence[str] | None = None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
