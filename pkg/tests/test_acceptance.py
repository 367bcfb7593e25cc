"""Acceptance criteria, one test per criterion, each printing a pass line
with the measured quantities at the stated tolerances."""

import math
import time

import numpy as np
import pytest

from plcontrol import (
    Point,
    assemble_bounded_equivalence,
    build_cellulation,
    build_family,
    canonical,
    comesh_of,
    complex_metric,
    cone_distance,
    coning_map,
    contractibility_verdict,
    distance,
    enumerate_flags,
    epsilon_schedule,
    evaluate_map,
    fiber_join,
    fiber_over_barycenter,
    homology,
    identity_map,
    make_point,
    measure_control,
    mesh_comesh,
    run_verify,
    slice_equivalence,
    straightline_homotopy,
    vertex_point,
)
from plcontrol import fixtures
from plcontrol.homotopies import TrivialFamily

SQRT2 = math.sqrt(2.0)
COMESH2 = 1.0 / math.sqrt(6.0)


def report(n, text):
    print(f"\n[acceptance] criterion {n}: PASS - {text}")


def test_criterion_1_metric_anchors():
    start = time.perf_counter()
    named = [
        ("D1", fixtures.d1(), None),
        ("D2", fixtures.d2(), COMESH2),
        ("BD2", fixtures.bd2(), None),
        ("cone(BD2)", fixtures.cone_bd2(), COMESH2),
        ("boundary of the 3-simplex", fixtures.sphere2(), COMESH2),
        ("projection source", fixtures.proj_X(), COMESH2),
        ("projection target", fixtures.proj_Y(), COMESH2),
    ]
    for name, K, cm in named:
        mesh, comesh = mesh_comesh(K)
        assert mesh == pytest.approx(SQRT2, abs=1e-9), name
        if cm is not None:
            assert comesh == pytest.approx(cm, abs=1e-9), name
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    report(1, f"mesh=sqrt(2) on {len(named)} fixtures, comesh=1/sqrt(6) on the "
              f"2-dimensional ones, all to 1e-9 ({elapsed:.3f}s)")


def test_criterion_2_flag_census():
    start = time.perf_counter()

    def oracle(K):
        simps = K.sorted_simplices()
        chains = []

        def grow(chain):
            chains.append(tuple(chain))
            for t in simps:
                if chain[-1] < t:
                    chain.append(t)
                    grow(chain)
                    chain.pop()

        for s in simps:
            grow([s])
        total, by_dim = 0, {}
        for c in chains:
            for base in c[0].faces():
                d = base.dim + len(c) - 1
                by_dim[d] = by_dim.get(d, 0) + 1
                total += 1
        return total, by_dim

    flags1 = enumerate_flags(fixtures.d1())
    assert len(flags1) == 7 == oracle(fixtures.d1())[0]
    flags2 = enumerate_flags(fixtures.d2())
    census = {}
    for f in flags2:
        census[f.dim] = census.get(f.dim, 0) + 1
    total, by_dim = oracle(fixtures.d2())
    assert len(flags2) == 43 == total
    assert census == by_dim == {0: 12, 1: 21, 2: 10}
    assert census[0] - census[1] + census[2] == 1
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    report(2, f"7 cells over the edge, 43 = (12,21,10) over the triangle, Euler 1, "
              f"matching the chain-enumeration oracle ({elapsed:.3f}s)")


def test_criterion_3_straightline_control():
    start = time.perf_counter()
    total_samples = 0
    worst_ratio = 0.0
    for name, K in [("D2", fixtures.d2()), ("PROJ target", fixtures.proj_Y())]:
        cm = comesh_of(K)
        for eps in [cm / 2**i for i in range(1, 6)]:
            h = straightline_homotopy(K, eps)
            rep = measure_control(h, None, None, samples=300, seed=0, time_steps=33,
                                  epsilon_target=eps)
            assert rep.samples >= 10_000
            assert rep.measured_control <= eps * (1.0 + 1e-4)
            total_samples += rep.samples
            worst_ratio = max(worst_ratio, rep.measured_control / eps)
            cel = build_cellulation(K, eps)
            for v, tau, img in cel.proper_vertex_images():
                tr = h.track(img)
                assert distance(K, tr(0.0), tr(1.0)) == pytest.approx(eps, abs=1e-9)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    report(3, f"straight-line control <= eps(1+1e-4) on both fixtures and five eps "
              f"values, {total_samples} samples in all, worst ratio {worst_ratio:.6f}, "
              f"vertex tracks exactly eps ({elapsed:.1f}s)")


def test_criterion_4_proof_identities():
    worst = 0.0
    for f in (fixtures.map_collapse(), fixtures.proj_map()):
        fam = build_family(f)
        X, Y = f.source, f.target
        eps = comesh_of(Y) / 2.0
        g, h1, h2 = fam.at(eps)
        rng = np.random.default_rng(0)
        gm = fam.gamma
        flags = enumerate_flags(Y)
        for _ in range(300):
            fl = flags[int(rng.integers(len(flags)))]
            s = rng.dirichlet(np.ones(len(fl.base.vertices)))
            t = rng.dirichlet(np.ones(len(fl.chain)))
            x = gm.eval_cell(fl.chain, fl.base, s, t)
            want = make_point(Y, {v: c for v, c in zip(fl.base.vertices, s) if c > 1e-12})
            worst = max(worst, distance(Y, evaluate_map(f, x), want))
        maxs_y = Y.maximal_simplices()
        for _ in range(200):
            sy = maxs_y[int(rng.integers(len(maxs_y)))]
            y = canonical(Y, Point(sy, tuple(rng.dirichlet(np.ones(len(sy.vertices))))))
            worst = max(worst, distance(Y, evaluate_map(f, g(y)), h2.track(y)(1.0)))
        maxs_x = X.maximal_simplices()
        for _ in range(100):
            sx = maxs_x[int(rng.integers(len(maxs_x)))]
            x = canonical(X, Point(sx, tuple(rng.dirichlet(np.ones(len(sx.vertices))))))
            tr = h1.track(x)
            trh2 = h2.track(evaluate_map(f, x))
            for t in np.linspace(0.0, 1.0, 9):
                worst = max(
                    worst,
                    distance(Y, evaluate_map(f, tr(float(t) / 2.0)), trh2(float(t))),
                )
            anchor = evaluate_map(f, tr(0.5))
            for t in np.linspace(0.5, 1.0, 9):
                worst = max(worst, distance(Y, evaluate_map(f, tr(float(t))), anchor))
    assert worst <= 1e-9
    report(4, f"f after gamma is the projection, f(g(y)) = h2(y,1), "
              f"f(h1'(x,t)) = h2(f(x),t), f(h1''(x,.)) constant; sampled sup {worst:.2e}")


def test_criterion_5_family_law():
    start = time.perf_counter()
    lines = []
    for name, f in [("collapse", fixtures.map_collapse()), ("projection", fixtures.proj_map())]:
        fam = build_family(f)
        for eps in epsilon_schedule(f.target):
            g, h1, h2 = fam.at(eps)
            rg = measure_control(g, None, f, samples=150, seed=0, epsilon_target=eps)
            rh1 = measure_control(h1, f, f, samples=40, seed=0, time_steps=33, epsilon_target=eps)
            rh2 = measure_control(h2, None, None, samples=60, seed=0, time_steps=33, epsilon_target=eps)
            for label, rep in (("g", rg), ("h1", rh1), ("h2", rh2)):
                assert rep.measured_control <= eps * (1.0 + 1e-4), (name, eps, label)
            lines.append(f"{name}@{eps:.4f}: g={rg.measured_control:.4f} "
                         f"h1={rh1.measured_control:.4f} h2={rh2.measured_control:.4f}")
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    report(5, f"g, h1, h2 all within eps(1+1e-4) across the schedule on both maps "
              f"({elapsed:.1f}s): " + "; ".join(lines))


def test_criterion_6_worked_example_reproduction():
    f = fixtures.proj_map()
    Y = f.target
    fam = fixtures.proj_explicit_family()
    gm = fam.gamma
    rho = Y.simplex(["0", "e1+e2"])
    s1 = Y.simplex(["0", "e1", "e1+e2"])
    s2 = Y.simplex(["0", "e2", "e1+e2"])
    rng = np.random.default_rng(1)
    # the four displayed extension formulas, as heights in the fibers
    for _ in range(50):
        t2 = rng.dirichlet(np.ones(2))
        t3 = rng.dirichlet(np.ones(3))
        assert fixtures.proj_height(gm.gamma_chain((rho, s1), t2)) == pytest.approx(0.5 * t2[0], abs=1e-12)
        assert fixtures.proj_height(gm.gamma_chain((rho, s2), t2)) == pytest.approx(0.5 * t2[0] + t2[1], abs=1e-12)
        for vl in ("0", "e1+e2"):
            v = Y.simplex([vl])
            assert fixtures.proj_height(gm.gamma_chain((v, rho, s1), t3)) == pytest.approx(
                0.5 * t3[0] + 0.5 * t3[1], abs=1e-12)
            assert fixtures.proj_height(gm.gamma_chain((v, rho, s2), t3)) == pytest.approx(
                0.5 * t3[0] + 0.5 * t3[1] + t3[2], abs=1e-12)
    # base values 0 / one half / 1 on the three regions
    assert fixtures.proj_height(gm.basepoints[s1]) == pytest.approx(0.0, abs=1e-12)
    assert fixtures.proj_height(gm.basepoints[rho]) == pytest.approx(0.5, abs=1e-12)
    assert fixtures.proj_height(gm.basepoints[s2]) == pytest.approx(1.0, abs=1e-12)
    # cell-wise behavior of g_eps
    eps = 0.05
    g, _, _ = fam.at(eps)
    cel = build_cellulation(Y, eps)
    counts = {"flat": 0, "top": 0, "collar": 0}
    top_fiber = fiber_over_barycenter(f, s2)
    (top_vertex,) = top_fiber.embedding.values()
    for _ in range(400):
        sy = (s1, s2)[int(rng.integers(2))]
        y = canonical(Y, Point(sy, tuple(rng.dirichlet(np.ones(3)))))
        cell, _ = cel.invert(y)
        z = fixtures.proj_height(g(y))
        if cell.flag.chain == (s1,):
            assert abs(z) <= 1e-9
            counts["flat"] += 1
        elif cell.flag.chain == (s2,):
            expected = fixtures.proj_height(fiber_join(f, top_vertex, y))
            assert abs(z - expected) <= 1e-9
            counts["top"] += 1
        else:
            assert -1e-9 <= z <= 1.0 + 1e-9
            counts["collar"] += 1
    assert min(counts.values()) >= 20
    rep = measure_control(g, None, f, samples=200, seed=2, epsilon_target=eps)
    assert rep.measured_control <= eps * (1.0 + 1e-4)
    report(6, f"explicit section formulas reproduced exactly; g maps the flat sheet "
              f"to height 0 ({counts['flat']} samples), the top sheet to its lift "
              f"({counts['top']}), collar cells interpolate ({counts['collar']}); "
              f"control {rep.measured_control:.6f} <= {eps}")


def test_criterion_7_open_cone_metric():
    D2 = fixtures.d2()
    dM = complex_metric(D2)
    pa, pb = vertex_point(D2, "a"), vertex_point(D2, "b")
    ab = distance(D2, pa, pb)
    # the three displayed cases, on base distance 1 rescaled to the fixture
    assert cone_distance(lambda p, q: 1.0, coning_map(pa, 2.0), coning_map(pb, 2.0)) == pytest.approx(2.0, abs=1e-12)
    assert cone_distance(dM, coning_map(None, -1.0), coning_map(None, -3.0)) == pytest.approx(2.0, abs=1e-12)
    assert cone_distance(dM, coning_map(pa, 1.0), coning_map(pa, 5.0)) == pytest.approx(4.0, abs=1e-12)
    rng = np.random.default_rng(3)
    s = D2.simplex(["a", "b", "c"])

    def rand(h_lo=-2.0, h_hi=6.0):
        h = float(rng.uniform(h_lo, h_hi))
        p = canonical(D2, Point(s, tuple(rng.dirichlet(np.ones(3)))))
        return p, h

    for _ in range(10_000):
        (p, _), (q, _) = rand(), rand()
        t = float(rng.uniform(0.0, 8.0))
        lhs = cone_distance(dM, coning_map(p if t > 0 else None, t), coning_map(q if t > 0 else None, t))
        unit = cone_distance(dM, coning_map(p, 1.0), coning_map(q, 1.0))
        assert lhs == t * unit
    for _ in range(10_000):
        pts = [rand() for _ in range(3)]
        cps = [coning_map(p if h > 0 else None, h) for p, h in pts]
        d01 = cone_distance(dM, cps[0], cps[1])
        d12 = cone_distance(dM, cps[1], cps[2])
        d02 = cone_distance(dM, cps[0], cps[2])
        assert d02 <= d01 + d12 + 1e-9
        assert d01 == cone_distance(dM, cps[1], cps[0])
    report(7, "formula cases give 2, 2, 4; scaling exact on 10^4 pairs; triangle "
              "inequality and symmetry on 10^4 triples")


def test_criterion_8_assembly_and_slices():
    f = fixtures.map_collapse()
    fam = build_family(f)
    data = assemble_bounded_equivalence(f, fam, samples=40, seed=0, time_steps=17)
    assert data.bound <= 1.0 + 1e-3
    cm = fam.comesh
    rows = []
    for t in (2.0 / cm, 4.0 / cm, 8.0 / cm):
        sl = slice_equivalence(data, t)
        measured = max(sl.controls.values())
        assert measured <= data.bound / t * (1.0 + 1e-3)
        rows.append(f"t={t:.3f}: {measured:.6f} <= {data.bound / t:.6f}")
    ident = assemble_bounded_equivalence(
        identity_map(fixtures.d2()), TrivialFamily(fixtures.d2()), samples=10, time_steps=5
    )
    assert ident.bound <= 1e-6
    report(8, f"assembled bound B={data.bound:.6f} <= 1+1e-3; slices within B/t: "
              + "; ".join(rows) + f"; trivial identity family bound {ident.bound:.2e}")


def test_criterion_9_negative_control():
    f = fixtures.map_bad()
    fib = fiber_over_barycenter(f, f.target.simplex(["a", "b"]))
    tri = fib.triangulation
    assert len(tri.simplices_of_dim(0)) == 2 and tri.dimension == 0
    verdict = contractibility_verdict(tri)
    assert verdict.kind == "not_contractible"
    assert "b~0=1" in verdict.reason
    rep = run_verify(f, map_label="MAP_BAD")
    assert rep.exit_code == 1
    assert "{a,b}" in rep.render()
    report(9, "two-point fiber over the edge barycenter refuted via b~0=1; "
              "verify exits 1 naming {a,b}")


def test_criterion_10_contractibility_engine():
    expect = [
        (fixtures.d2(), "contractible", None),
        (fixtures.cone_bd2(), "contractible", None),
        (fixtures.bd2(), "not_contractible", "b~1=1"),
        (fixtures.sphere2(), "not_contractible", "b~2=1"),
    ]
    for K, kind, reason in expect:
        v = contractibility_verdict(K)
        assert v.kind == kind
        if reason:
            assert reason in v.reason
        if v.is_contractible:
            assert homology(K).trivial  # cross-check accompanies every certificate
    report(10, "disc and cone collapse to a point; circle and sphere refuted by "
               "their reduced homology; homology cross-check passed for every "
               "contractible verdict")
