import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hybzono.geometry import (
    halfplane_polygon,
    metrics_table,
    metrics_to_csv,
    polygons_to_json,
    project_sample,
    sample_directions,
)
from hybzono.queries import EmptySetError, enumerate_integer_feasible
from hybzono.sets import HybridZonotope, leaf, lift, make_box

from conftest import random_hybrid


def poly_support(vertices, d):
    return float(np.max(vertices @ d))


class TestHalfplanePolygon:
    def test_axis_square(self):
        dirs = np.array([[1.0, 0], [0, 1.0], [-1.0, 0], [0, -1.0]])
        verts = halfplane_polygon(dirs, np.ones(4))
        assert verts.shape == (4, 2)
        assert sorted(map(tuple, np.round(verts, 9))) == [
            (-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0),
        ]

    def test_redundant_halfplane_dropped(self):
        dirs = sample_directions(8)
        offsets = np.ones(8)
        offsets[0] = 5.0  # never active
        verts = halfplane_polygon(dirs, offsets)
        for d, o in zip(dirs[1:], offsets[1:]):
            assert poly_support(verts, d) <= o + 1e-9


class TestProjectSample:
    def test_unit_square_exact(self):
        sq = lift(make_box([-1, -1], [1, 1]))
        samples = project_sample(sq, (0, 1), n_dirs=4)
        assert len(samples) == 1
        verts = samples[0].vertices
        assert verts.shape == (4, 2)
        assert poly_support(verts, np.array([1.0, 0])) == pytest.approx(1.0)

    def test_per_leaf_translates(self, zh_pair):
        Zh1, _ = zh_pair
        T = enumerate_integer_feasible(Zh1)
        samples = project_sample(Zh1, (0, 1), n_dirs=16, per_leaf=True, T=T)
        assert len(samples) == 8
        base = samples[0].vertices - samples[0].vertices.mean(axis=0)
        for s in samples[1:]:
            centered = s.vertices - s.vertices.mean(axis=0)
            assert centered.shape == base.shape
            assert_allclose(centered, base, atol=1e-9)

    def test_polygon_contains_member_points(self, rng):
        for _ in range(5):
            zh = random_hybrid(rng, n_max=3, force_nonempty=True)
            if zh.n < 2:
                continue
            samples = project_sample(zh, (0, 1), n_dirs=24)
            dirs, offs = samples[0].directions, samples[0].offsets
            for _ in range(100):
                xc = rng.uniform(-1, 1, size=zh.n_g)
                xb = rng.choice([-1.0, 1.0], size=zh.n_b)
                if zh.n_c and np.max(np.abs(zh.Ac @ xc + zh.Ab @ xb - zh.b)) > 1e-9:
                    continue
                z = zh.Gc @ xc + zh.Gb @ xb + zh.c
                assert np.all(dirs @ z[:2] <= offs + 1e-7)

    def test_support_tightness(self, rng):
        from hybzono.queries import support

        zh = random_hybrid(rng, n_max=3, ng_max=4, force_nonempty=True)
        while zh.n < 2:
            zh = random_hybrid(rng, n_max=3, ng_max=4, force_nonempty=True)
        samples = project_sample(zh, (0, 1), n_dirs=12)
        s = samples[0]
        if len(s.vertices) >= 3:
            for d, o in zip(s.directions, s.offsets):
                assert poly_support(s.vertices, d) == pytest.approx(o, abs=1e-7)

    def test_empty_set_raises(self):
        zh = HybridZonotope(
            np.eye(2), None, [0, 0], [[1.0, 1.0]], None, [3.0]
        )
        with pytest.raises(EmptySetError):
            project_sample(zh, (0, 1), n_dirs=4)

    def test_bad_axes(self):
        sq = lift(make_box([-1, -1], [1, 1]))
        with pytest.raises(ValueError):
            project_sample(sq, (0, 2))


class TestMetrics:
    def make_result(self):
        from hybzono.mld import build_pwa_two_mode, pwa_initial_set
        from hybzono.reach import ReachOptions, reach

        m, dom = build_pwa_two_mode()
        return reach(lift(pwa_initial_set()), m, dom, ReachOptions(steps=2))

    def test_rows(self):
        res = self.make_result()
        rows = metrics_table(res)
        assert rows[0]["set"] == "R0"
        assert rows[-1]["set"] == "R2"
        assert rows[-1]["n_g"] == 26
        assert rows[-1]["T"] == 1

    def test_reduced_labels(self):
        res = self.make_result()
        rows = metrics_table(res, reduced=True)
        assert rows[-1]["set"] == "R2r"

    def test_csv_header_only_for_empty(self):
        text = metrics_to_csv([])
        assert text.strip() == "set,n_g,n_b,n_c,T,time"

    def test_polygon_json_schema(self, zh_pair):
        Zh1, _ = zh_pair
        T = enumerate_integer_feasible(Zh1)
        samples = project_sample(Zh1, (0, 1), n_dirs=8, per_leaf=True, T=T)
        payload = json.loads(polygons_to_json((0, 1), samples))
        assert payload["axes"] == [0, 1]
        assert len(payload["leaves"]) == 8
        assert payload["leaves"][0]["xi_b"] == [-1, -1, -1]
