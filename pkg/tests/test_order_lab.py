"""Majorization, T-transforms and stop-loss convex-order tests."""
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from lpheat.errors import DomainError, UsageError
from lpheat.lp_model import BallParams
from lpheat.order_lab import (CONSISTENT, TTransfer, convex_order_test, default_grid, majorizes,
                              p_gt_2_counterexample, random_t_transforms, replay, schur_scan,
                              stop_loss_curve, strictly_majorizes, t_transform_chain)
from lpheat.profile import Direction
from lpheat.scalar_math import RngStream


@st.composite
def simplex(draw, n=None):
    n = draw(st.integers(min_value=2, max_value=6)) if n is None else n
    w = draw(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=n, max_size=n))
    w = np.asarray(w)
    assume(w.sum() > 1e-3)
    return w / w.sum()


class TestMajorization:
    def test_examples(self):
        assert majorizes([1, 0], [0.5, 0.5])
        assert majorizes([0.5, 0.3, 0.2], [0.4, 0.4, 0.2])
        assert not majorizes([0.4, 0.4, 0.2], [0.5, 0.3, 0.2])

    @given(simplex())
    def test_uniform_is_minimal(self, s):
        assert majorizes(s, np.full(s.size, 1.0 / s.size))

    @given(simplex())
    def test_reflexive(self, s):
        assert majorizes(s, s)
        assert not strictly_majorizes(s, s)

    @given(simplex(4), simplex(4), simplex(4))
    def test_transitive(self, a, b, c):
        if majorizes(a, b) and majorizes(b, c):
            assert majorizes(a, c)

    @given(simplex(4))
    def test_antisymmetric_up_to_permutation(self, s):
        perm = s[::-1]
        assert majorizes(s, perm) and majorizes(perm, s)

    def test_unequal_totals(self):
        with pytest.raises(DomainError):
            majorizes([1, 0], [0.3, 0.3])


class TestTTransforms:
    def test_to_uniform(self):
        src, tgt = np.array([1.0, 0, 0]), np.full(3, 1 / 3)
        chain = t_transform_chain(src, tgt)
        assert len(chain) <= 2
        np.testing.assert_allclose(replay(src, chain)[-1], tgt, atol=1e-12)

    def test_identity(self):
        assert t_transform_chain([0.5, 0.3, 0.2], [0.5, 0.3, 0.2]) == []

    def test_two_point(self):
        chain = t_transform_chain([0.7, 0.3], [0.5, 0.5])
        assert len(chain) == 1
        assert chain[0].lam == pytest.approx(0.5)

    def test_bad_transfer(self):
        with pytest.raises(DomainError):
            TTransfer(0, 0, 0.5)
        with pytest.raises(DomainError):
            TTransfer(0, 1, 1.5)

    def test_requires_majorization(self):
        with pytest.raises(DomainError):
            t_transform_chain([0.4, 0.4, 0.2], [0.5, 0.3, 0.2])

    @given(simplex(), st.integers(min_value=0, max_value=2**31), st.integers(min_value=1, max_value=6))
    def test_replay_reproduces_target(self, s, seed, steps):
        s = np.sort(s)[::-1]
        target, _ = random_t_transforms(s, RngStream(seed), steps)
        target = np.sort(target)[::-1]
        chain = t_transform_chain(s, target)
        assert len(chain) <= s.size - 1
        path = replay(s, chain)
        np.testing.assert_allclose(path[-1], target, atol=1e-10)
        for a, b in zip(path[:-1], path[1:]):
            assert majorizes(a, b, 1e-10)


class TestStopLossCurve:
    def test_zero_threshold(self):
        m, _ = stop_loss_curve([0.1, 0.5, 0.9], [0.0])
        assert m[0] == 0.0

    def test_inactive_positive_part(self):
        u = np.array([0.1, 0.5, 0.9])
        m, _ = stop_loss_curve(u, [2.0])
        assert m[0] == pytest.approx(2.0 - u.mean())

    def test_uniform(self):
        u = np.random.default_rng(0).random(100_000)
        m, se = stop_loss_curve(u, [0.5])
        assert abs(m[0] - 0.125) < 4 * se[0]

    def test_invalid(self):
        with pytest.raises(UsageError):
            stop_loss_curve([], [0.1])
        with pytest.raises(DomainError):
            stop_loss_curve([0.1], [-1.0])


class TestConvexOrder:
    def test_two_dimensional(self):
        rep = convex_order_test(BallParams(1.5, 2), Direction.coordinate(2), Direction.diagonal(2),
                                default_grid(), 200_000, RngStream(1))
        assert rep.verdict == CONSISTENT
        assert rep.thresholds.size == 41

    def test_identical_directions(self):
        d = Direction.of([0.6, 0.8, 0.0])
        rep = convex_order_test(BallParams(1.3, 3), d, d, None, 50_000, RngStream(2))
        assert rep.verdict == CONSISTENT
        np.testing.assert_allclose(rep.lhs, rep.rhs, atol=1e-15)

    def test_cross_polytope(self):
        rep = convex_order_test(BallParams(1, 3), Direction.coordinate(3), Direction.canonical(3, 2),
                                None, 200_000, RngStream(3))
        assert rep.verdict == CONSISTENT

    def test_curves_in_feasible_band(self):
        rep = convex_order_test(BallParams(1.7, 3), Direction.coordinate(3), Direction.diagonal(3),
                                None, 50_000, RngStream(4))
        assert np.all(rep.lhs >= 0) and np.all(rep.lhs <= rep.thresholds)
        # with full orbit averaging both means reduce to |X|^2 / n and agree to rounding
        assert abs(rep.mean_u - rep.mean_v) <= 4 * rep.mean_se + 1e-15

    def test_requires_majorization(self):
        with pytest.raises(DomainError):
            convex_order_test(BallParams(1.5, 2), Direction.diagonal(2), Direction.coordinate(2))

    def test_rejects_p2(self):
        with pytest.raises(DomainError):
            convex_order_test(BallParams(2, 2), Direction.coordinate(2), Direction.diagonal(2))


class TestSchurScan:
    def test_canonical_chain(self):
        chain = [Direction.canonical(4, k) for k in range(1, 5)]
        rep = schur_scan(BallParams(1, 4), 0.5, chain, 10**6, RngStream(5))
        assert rep.monotone
        assert np.all(rep.margins > 3)

    def test_rejects_p2(self):
        with pytest.raises(DomainError):
            schur_scan(BallParams(2, 2), 0.5, [Direction.coordinate(2), Direction.diagonal(2)])

    def test_chain_from_t_transforms(self):
        s0 = np.array([0.7, 0.2, 0.1])
        s1, _ = random_t_transforms(s0, RngStream(6), 1, lam_range=(0.6, 0.7))
        s1 = np.sort(s1)[::-1]
        chain = [Direction.of(np.sqrt(s0)), Direction.of(np.sqrt(s1)), Direction.diagonal(3)]
        rep = schur_scan(BallParams(1.5, 3), 1.0, chain, 10**6, RngStream(7))
        assert rep.monotone

    def test_needs_strict_order(self):
        with pytest.raises(DomainError):
            schur_scan(BallParams(1.5, 2), 0.5, [Direction.diagonal(2), Direction.coordinate(2)])


class TestCounterexample:
    def test_support_bounds(self):
        rep = p_gt_2_counterexample(3.0, 2, 10_000, RngStream(0))
        assert rep.support_bound == pytest.approx(2 ** (1 / 6), abs=1e-12)
        assert p_gt_2_counterexample(4.0, 2, 1000).support_bound == pytest.approx(2 ** 0.25, abs=1e-12)

    def test_coordinate_excess_is_zero(self):
        rep = p_gt_2_counterexample(3.0, 3, 100_000, RngStream(1))
        assert rep.coord_stop_loss == 0.0
        assert rep.prob_exceed > 0 and rep.lower_3sigma > 0

    def test_requires_p_above_two(self):
        with pytest.raises(DomainError):
            p_gt_2_counterexample(2.0)
