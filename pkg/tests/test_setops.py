import numpy as np
import pytest
from numpy.testing import assert_allclose

from hybzono.queries import is_empty, support
from hybzono.sets import lift, make_box
from hybzono.setops import (
    Halfspace,
    generalized_intersection,
    halfspace_intersection,
    linear_map,
    minkowski_sum,
)

from conftest import random_hybrid


def unit_square():
    return lift(make_box([-1, -1], [1, 1]))


def directions_2d(k=20):
    a = np.linspace(0, 2 * np.pi, k, endpoint=False)
    return np.stack([np.cos(a), np.sin(a)], axis=1)


class TestHalfspaceType:
    def test_rejects_zero_normal(self):
        with pytest.raises(ValueError):
            Halfspace([0.0, 0.0], 1.0)

    def test_degenerate_flag(self):
        h = Halfspace([0.0], 1.0, allow_degenerate=True)
        assert h.rho == 1.0


class TestLinearMap:
    def test_identity_keeps_structure(self, zh_pair):
        _, Zh2 = zh_pair
        out = linear_map(np.eye(2), Zh2)
        assert_allclose(out.Gc, Zh2.Gc)
        assert_allclose(out.Ab, Zh2.Ab)
        assert out.dims == Zh2.dims

    def test_zero_map_gives_origin(self):
        out = linear_map(np.zeros((1, 2)), unit_square())
        rho, _ = support(out, [1.0])
        assert rho == pytest.approx(0.0, abs=1e-12)

    def test_support_identity_random(self, rng):
        for _ in range(50):
            zh = random_hybrid(rng, force_nonempty=True)
            m = int(rng.integers(1, 4))
            R = rng.uniform(-1.5, 1.5, size=(m, zh.n))
            out = linear_map(R, zh)
            l = rng.normal(size=m)
            lhs, _ = support(out, l)
            rhs, _ = support(zh, R.T @ l)
            assert lhs == pytest.approx(rhs, abs=1e-9 * (1 + abs(rhs)))


class TestMinkowskiSum:
    def test_sum_with_origin(self):
        sq = unit_square()
        origin = lift(make_box([0, 0], [0, 0]))
        out = minkowski_sum(sq, origin)
        for l in directions_2d(8):
            a, _ = support(out, l)
            b, _ = support(sq, l)
            assert a == pytest.approx(b, abs=1e-9)

    def test_interval_doubling(self):
        seg = lift(make_box([-1], [1]))
        out = minkowski_sum(seg, seg)
        assert support(out, [1.0])[0] == pytest.approx(2.0)
        assert support(out, [-1.0])[0] == pytest.approx(2.0)

    def test_support_additivity_random(self, rng):
        for _ in range(50):
            zh = random_hybrid(rng, force_nonempty=True)
            wh = random_hybrid(rng, n_max=zh.n, force_nonempty=True)
            while wh.n != zh.n:
                wh = random_hybrid(rng, n_max=zh.n, force_nonempty=True)
            out = minkowski_sum(zh, wh)
            l = rng.normal(size=zh.n)
            total, _ = support(out, l)
            parts = support(zh, l)[0] + support(wh, l)[0]
            assert total == pytest.approx(parts, abs=1e-9 * (1 + abs(parts)))

    def test_growth_bookkeeping(self, zh_pair):
        Zh1, Zh2 = zh_pair
        out = minkowski_sum(Zh1, Zh2)
        assert out.dims == (6, 6, 1)


class TestGeneralizedIntersection:
    def test_self_intersection_preserves_set(self, zh_pair):
        _, Zh2 = zh_pair
        out = generalized_intersection(Zh2, Zh2)
        for l in directions_2d(20):
            a, _ = support(out, l)
            b, _ = support(Zh2, l)
            assert a == pytest.approx(b, abs=1e-8)

    def test_disjoint_boxes_empty(self):
        sq = unit_square()
        shifted = lift(make_box([2, 2], [4, 4]))
        assert is_empty(generalized_intersection(sq, shifted))

    def test_projection_intersection(self):
        sq = unit_square()
        seg = lift(make_box([0.5], [2.0]))
        out = generalized_intersection(sq, seg, R=np.array([[1.0, 0.0]]))
        assert support(out, [1.0, 0.0])[0] == pytest.approx(1.0, abs=1e-9)
        assert support(out, [-1.0, 0.0])[0] == pytest.approx(-0.5, abs=1e-9)

    def test_growth_bookkeeping(self, zh_pair):
        Zh1, Zh2 = zh_pair
        out = generalized_intersection(Zh1, Zh2, R=np.eye(2))
        assert out.dims == (
            Zh1.n_g + Zh2.n_g,
            Zh1.n_b + Zh2.n_b,
            Zh1.n_c + Zh2.n_c + 2,
        )


class TestHalfspaceIntersection:
    def test_half_box(self):
        out = halfspace_intersection(unit_square(), Halfspace([1.0, 0.0], 0.0))
        assert support(out, [1.0, 0.0])[0] == pytest.approx(0.0, abs=1e-9)
        assert support(out, [-1.0, 0.0])[0] == pytest.approx(1.0, abs=1e-9)

    def test_inactive_halfspace_keeps_set(self):
        sq = unit_square()
        out = halfspace_intersection(sq, Halfspace([1.0, 0.0], 5.0))
        for l in directions_2d(20):
            a, _ = support(out, l)
            b, _ = support(sq, l)
            assert a == pytest.approx(b, abs=1e-9)

    def test_separated_halfspace_empty(self):
        out = halfspace_intersection(unit_square(), Halfspace([1.0, 0.0], -5.0))
        assert is_empty(out)

    def test_growth_is_one_generator_one_row(self, zh_pair):
        _, Zh2 = zh_pair
        out = halfspace_intersection(Zh2, Halfspace([1.0, 1.0], 0.5))
        assert out.dims == (Zh2.n_g + 1, Zh2.n_b, Zh2.n_c + 1)
        assert out.slack_tags == ((Zh2.n_g, Zh2.n_c),)

    def test_slack_tag_offsets_through_sum(self, zh_pair):
        Zh1, _ = zh_pair
        cut = halfspace_intersection(Zh1, Halfspace([1.0, 0.0], 0.0))
        out = minkowski_sum(Zh1, cut)
        assert out.slack_tags == ((Zh1.n_g + Zh1.n_g, 0),)

    def test_membership_against_direct_predicate(self, rng):
        from hybzono.queries import contains_point

        for _ in range(20):
            zh = random_hybrid(rng, n_max=2, force_nonempty=True)
            l = rng.normal(size=zh.n)
            rho = float(rng.uniform(-1, 1))
            out = halfspace_intersection(zh, Halfspace(l, rho))
            for _ in range(5):
                pt = rng.uniform(-3, 3, size=zh.n)
                direct = contains_point(zh, pt) and l @ pt <= rho + 1e-8
                assert contains_point(out, pt) == direct

    def test_emptiness_matches_support_sign(self, rng):
        from hybzono.queries import intersects_halfspace

        hits = 0
        for _ in range(50):
            zh = random_hybrid(rng, force_nonempty=True)
            l = rng.normal(size=zh.n)
            rho = float(rng.uniform(-2, 2))
            hs = Halfspace(l, rho)
            # Minimum of l @ z over the set via the negated support.
            min_val = -support(zh, -l)[0]
            expected = min_val <= rho + 1e-9
            got = intersects_halfspace(zh, hs)
            if abs(min_val - rho) > 1e-7:
                assert got == expected
                hits += 1
        assert hits >= 40
