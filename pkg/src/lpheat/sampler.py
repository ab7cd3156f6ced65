"""Exact samplers for the uniform law on B_p^n and the generalized Gaussian.

Uniform draws use the sign-Dirichlet representation: with alpha = 1/p,
(T_0, T_1, ..., T_n) ~ Dirichlet(1, alpha, ..., alpha) and independent
Rademacher signs, X_i = eps_i * T_i**alpha is uniform on B_p^n.

Draw layout (fixed, so that a (seed, stream_id) pair pins the sample path):
for a batch of m points the stream first yields the m x (n+1) gamma block
(slack column first, row-major; shapes below one consume a second uniform
block for the boost step), then the m x n sign block.
"""
from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .errors import DomainError, UsageError
from .lp_model import BallParams
from .scalar_math import RngStream, as_generator, gamma_sample

DEFAULT_BATCH = 1 << 18


def _gamma_block(shapes: np.ndarray, gen: np.random.Generator, size: int) -> np.ndarray:
    shapes = np.asarray(shapes, dtype=float)
    small = shapes < 1
    g = gen.standard_gamma(np.where(small, shapes + 1.0, shapes), size=(size, shapes.size))
    if small.any():
        u = gen.random(size=(size, int(small.sum())))
        g[:, small] *= u ** (1.0 / shapes[small])
    return g


def sample_dirichlet(shapes, rng, size: int | None = None) -> np.ndarray:
    """Dirichlet draws by normalizing independent gamma variates.

    Returns shape ``(len(shapes),)`` when ``size`` is None, else
    ``(size, len(shapes))``.
    """
    shapes = np.atleast_1d(np.asarray(shapes, dtype=float))
    if shapes.ndim != 1 or shapes.size == 0 or np.any(~(shapes > 0)):
        raise DomainError("Dirichlet shapes must be a non-empty vector of positive reals")
    gen = as_generator(rng)
    m = 1 if size is None else int(size)
    g = _gamma_block(shapes, gen, m)
    t = g / g.sum(axis=1, keepdims=True)
    return t[0] if size is None else t


def ball_magnitudes(alpha: float, n: int, rng, size: int) -> np.ndarray:
    """|X_i| = T_i**alpha for the sign-Dirichlet law; any alpha > 0.

    Exposed separately because symmetrized estimators average over signs
    analytically, and because the p > 2 counterexample needs alpha < 1/2.
    """
    if not alpha > 0:
        raise DomainError("alpha must be > 0")
    gen = as_generator(rng)
    shapes = np.concatenate(([1.0], np.full(n, alpha)))
    g = _gamma_block(shapes, gen, int(size))
    t = g[:, 1:] / g.sum(axis=1, keepdims=True)
    return t**alpha


def _signed(mags: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    signs = gen.integers(0, 2, size=mags.shape, dtype=np.int8) * 2 - 1
    return mags * signs


def sample_ball_any_p(p: float, n: int, rng, size: int | None = None) -> np.ndarray:
    """Uniform draws on B_p^n for any p > 0 (no BallParams range guard)."""
    if not p > 0:
        raise DomainError("p must be > 0")
    gen = as_generator(rng)
    m = 1 if size is None else int(size)
    x = _signed(ball_magnitudes(1.0 / p, n, gen, m), gen)
    return x[0] if size is None else x


def sample_uniform_ball(params: BallParams, rng, size: int | None = None) -> np.ndarray:
    """Uniform draws on B_p^n; each row satisfies sum |x_i|^p = 1 - T_0 <= 1."""
    return sample_ball_any_p(params.p, params.n, rng, size)


def iter_ball_batches(
    p: float,
    n: int,
    rng: RngStream,
    budget: int,
    batch: int = DEFAULT_BATCH,
    signed: bool = True,
) -> Iterator[np.ndarray]:
    """Yield ``budget`` uniform draws in batches.

    Batch ``j`` comes from block ``j`` of the stream (a counter jump), so
    batches can be produced in any order or in parallel and still give the
    same overall sample.
    """
    if budget <= 0:
        raise UsageError("Monte Carlo budget must be positive")
    if not isinstance(rng, RngStream):
        raise TypeError("batched sampling needs an RngStream token")
    done, j = 0, 0
    while done < budget:
        m = min(batch, budget - done)
        gen = rng.generator(block=j)
        mags = ball_magnitudes(1.0 / p, n, gen, m)
        yield _signed(mags, gen) if signed else mags
        done += m
        j += 1


def sample_gen_gaussian(p: float, rng, size: int | None = None):
    """Draws with density exp(-|x|^p) / (2 Gamma(1 + 1/p)).

    |Z| = G**(1/p) with G ~ Gamma(1/p); the sign is an independent fair coin.
    """
    if not (1.0 <= p <= 2.0):
        raise DomainError(f"p must lie in [1, 2], got {p!r}")
    gen = as_generator(rng)
    g = gamma_sample(1.0 / p, gen, size=size)
    mag = np.asarray(g) ** (1.0 / p)
    sign = gen.integers(0, 2, size=size) * 2 - 1
    out = mag * sign
    return float(out) if size is None else out


def gen_gaussian_density_at_zero(p: float) -> float:
    return 1.0 / (2.0 * math.gamma(1.0 + 1.0 / p))
