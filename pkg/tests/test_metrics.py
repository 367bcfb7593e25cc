import math

import numpy as np
import pytest

from plcontrol import (
    Point,
    canonical,
    closure_complex,
    distance,
    make_point,
    mesh_comesh,
    min_distance_to_simplex,
    simplex_metrics,
    vertex_point,
)
from plcontrol import fixtures

SQRT2 = math.sqrt(2.0)


def random_point(K, rng):
    maxs = K.maximal_simplices()
    s = maxs[int(rng.integers(len(maxs)))]
    w = rng.dirichlet(np.ones(len(s.vertices)))
    return canonical(K, Point(s, tuple(w)))


def test_vertex_distance_is_sqrt2(D2):
    assert distance(D2, vertex_point(D2, "a"), vertex_point(D2, "b")) == pytest.approx(SQRT2, abs=1e-12)


def test_distance_to_self_is_zero(D2, rng):
    for _ in range(20):
        p = random_point(D2, rng)
        assert distance(D2, p, p) == 0.0


def test_distance_across_components_is_infinite():
    two = closure_complex([("a", "b"), ("x", "y")])
    assert distance(two, vertex_point(two, "a"), vertex_point(two, "x")) == math.inf


def test_distance_symmetric_and_triangle(BD2, rng):
    pts = [random_point(BD2, rng) for _ in range(12)]
    d = {}
    for i, p in enumerate(pts):
        for j, q in enumerate(pts):
            d[i, j] = distance(BD2, p, q, refinement=2)
    for i in range(len(pts)):
        for j in range(len(pts)):
            assert d[i, j] == pytest.approx(d[j, i], abs=1e-9)
            for k in range(len(pts)):
                assert d[i, j] <= d[i, k] + d[k, j] + 1e-9


def test_distance_monotone_in_refinement(BD2, rng):
    for _ in range(8):
        p = random_point(BD2, rng)
        q = random_point(BD2, rng)
        vals = [distance(BD2, p, q, refinement=r) for r in (1, 2, 3, 4)]
        for a, b in zip(vals, vals[1:]):
            assert b <= a + 1e-12


def test_cross_simplex_distance_on_circle(BD2):
    # a to the midpoint of bc: shortest route passes a vertex
    mid = make_point(BD2, {"b": 0.5, "c": 0.5})
    d = distance(BD2, vertex_point(BD2, "a"), mid, refinement=2)
    assert d == pytest.approx(SQRT2 * 1.5, abs=1e-9)


def test_identity_metrics_edge(D1):
    rep = simplex_metrics(D1, D1.simplex(["a", "b"]))
    assert rep.diam == pytest.approx(SQRT2, abs=1e-9)
    assert rep.rad == pytest.approx(1.0 / SQRT2, abs=1e-9)


def test_identity_metrics_triangle(D2):
    rep = simplex_metrics(D2, D2.simplex(["a", "b", "c"]))
    assert rep.diam == pytest.approx(SQRT2, abs=1e-9)
    assert rep.rad == pytest.approx(1.0 / math.sqrt(6.0), abs=1e-9)


def test_vertex_rad_is_infinite(D2):
    assert simplex_metrics(D2, D2.simplex(["a"])).rad == math.inf


def test_mesh_comesh_anchors():
    for K, cm in [
        (fixtures.d1(), 1 / SQRT2),
        (fixtures.d2(), 1 / math.sqrt(6)),
        (fixtures.bd2(), 1 / SQRT2),
        (fixtures.sphere2(), 1 / math.sqrt(6)),
        (fixtures.proj_Y(), 1 / math.sqrt(6)),
    ]:
        mesh, comesh = mesh_comesh(K)
        assert mesh == pytest.approx(SQRT2, abs=1e-9)
        assert comesh == pytest.approx(cm, abs=1e-9)


def test_metrics_through_control_map(MAP_COLLAPSE):
    D2 = MAP_COLLAPSE.source
    rep = simplex_metrics(
        D2, D2.simplex(["a", "b", "c"]), control=MAP_COLLAPSE, target=MAP_COLLAPSE.target
    )
    # image spans the whole edge, so the barycenter image sits on it
    assert rep.diam == pytest.approx(SQRT2, abs=1e-9)
    assert rep.rad == pytest.approx(0.0, abs=1e-9)


def test_min_distance_to_simplex():
    V = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert min_distance_to_simplex(np.array([0.0, 0.0]), V) == pytest.approx(1 / SQRT2)
    assert min_distance_to_simplex(np.array([1.0, 0.0]), V) == 0.0
    assert min_distance_to_simplex(np.array([2.0, 0.0]), V) == pytest.approx(1.0)
