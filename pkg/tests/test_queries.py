import itertools

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from hybzono.lp import LinearProgram, Status, lp_solve
from hybzono.queries import (
    EmptySetError,
    contains_point,
    enumerate_integer_feasible,
    is_empty,
    support,
    support_witness,
)
from hybzono.sets import HybridZonotope, decompose, leaf, lift, make_box

from conftest import random_hybrid


def leaf_is_feasible(zc):
    """LP feasibility of a constrained zonotope, straight from its data."""
    n_g = zc.n_g
    lp = LinearProgram(np.zeros(n_g), zc.A, zc.b, -np.ones(n_g), np.ones(n_g))
    return lp_solve(lp, feasibility_only=True).status is Status.FEASIBLE


def leaf_contains(zc, z):
    n_g = zc.n_g
    A = np.vstack([zc.A, zc.G])
    b = np.concatenate([zc.b, z - zc.c])
    lp = LinearProgram(np.zeros(n_g), A, b, -np.ones(n_g), np.ones(n_g))
    return lp_solve(lp, feasibility_only=True).status is Status.FEASIBLE


class TestIsEmpty:
    def test_unit_box(self):
        assert not is_empty(lift(make_box([-1, -1], [1, 1])))

    def test_unsatisfiable_row(self):
        zh = HybridZonotope(np.eye(2), None, [0, 0], [[1.0, 1.0]], None, [3.0])
        assert is_empty(zh)

    def test_example_set_with_one_dead_leaf(self, zh_pair):
        assert not is_empty(zh_pair[1])


class TestContainsPoint:
    def test_box_membership(self):
        sq = lift(make_box([-1, -1], [1, 1]))
        assert contains_point(sq, [0.0, 0.0])
        assert not contains_point(sq, [2.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            contains_point(lift(make_box([-1], [1])), [0.0, 0.0])

    def test_witness_points_always_contained(self, rng):
        for _ in range(30):
            zh = random_hybrid(rng, force_nonempty=True)
            xc = rng.uniform(-1, 1, size=zh.n_g)
            xb = rng.choice([-1.0, 1.0], size=zh.n_b)
            if np.max(np.abs(zh.Ac @ xc + zh.Ab @ xb - zh.b), initial=0) > 1e-10:
                continue
            z = zh.Gc @ xc + zh.Gb @ xb + zh.c
            assert contains_point(zh, z)


class TestSupport:
    def test_unit_box_directions(self):
        sq = lift(make_box([-1, -1], [1, 1]))
        assert support(sq, [1.0, 1.0])[0] == pytest.approx(2.0)
        assert support(sq, [-1.0, 0.0])[0] == pytest.approx(1.0)

    def test_empty_set_raises(self):
        zh = HybridZonotope(np.eye(2), None, [0, 0], [[1.0, 1.0]], None, [3.0])
        with pytest.raises(EmptySetError):
            support(zh, [1.0, 0.0])

    def test_example_support_equals_max_over_leaves(self, zh_pair, rng):
        Zh1, _ = zh_pair
        T = enumerate_integer_feasible(Zh1)
        leaves = decompose(Zh1, T)
        for _ in range(20):
            l = rng.normal(size=2)
            rho, _ = support(Zh1, l)
            best = max(support(lift(zc), l)[0] for zc in leaves)
            assert rho == pytest.approx(best, abs=1e-8)

    def test_supporting_hyperplane_touches(self, rng):
        for _ in range(10):
            zh = random_hybrid(rng, force_nonempty=True)
            l = rng.normal(size=zh.n)
            rho, z = support_witness(zh, l)
            assert abs(l @ z - rho) <= 1e-7 * (1 + abs(rho))


class TestEnumerate:
    def test_no_binaries(self):
        T = enumerate_integer_feasible(lift(make_box([-1], [1])))
        assert T.n_b == 0 and len(T) == 1

    def test_example_counts(self, zh_pair):
        Zh1, Zh2 = zh_pair
        assert len(enumerate_integer_feasible(Zh1)) == 8
        T2 = enumerate_integer_feasible(Zh2)
        assert len(T2) == 7
        assert [-1, -1, -1] not in T2

    def test_matches_brute_force_on_random_sets(self, rng):
        for _ in range(60):
            zh = random_hybrid(rng)
            T = enumerate_integer_feasible(zh)
            expected = [
                xi
                for xi in itertools.product([-1, 1], repeat=zh.n_b)
                if leaf_is_feasible(leaf(zh, xi))
            ]
            got = [tuple(int(v) for v in row) for row in T]
            assert got == expected

    def test_decompose_leaves_nonempty(self, zh_pair):
        _, Zh2 = zh_pair
        T = enumerate_integer_feasible(Zh2)
        for zc in decompose(Zh2, T):
            assert leaf_is_feasible(zc)


class TestUnionProperty:
    def test_membership_is_disjunction_over_leaves(self, rng):
        # MILP membership must agree with the leaf-wise LP disjunction.
        for _ in range(25):
            zh = random_hybrid(rng, force_nonempty=True)
            assignments = list(itertools.product([-1, 1], repeat=zh.n_b))
            leaves = [leaf(zh, xi) for xi in assignments]
            for _ in range(8):
                scale = float(rng.uniform(0.5, 4.0))
                pt = rng.uniform(-scale, scale, size=zh.n)
                direct = any(leaf_contains(zc, pt) for zc in leaves)
                assert contains_point(zh, pt) == direct
