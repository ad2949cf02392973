import math

import numpy as np
import pytest

import helpers
from normspace import (
    LinearGroupAction,
    PairwiseRadiusError,
    PolyNorm,
    SpdNorm,
    UsageError,
    body_from_json,
    body_to_json,
    coarse_helly_witness_bodies,
    gauge,
    gi_distance_bodies,
    is_invariant,
    john_ellipsoid,
    mvee,
    polar,
    sampled_sup_ratio,
)
from normspace.bodies import (
    SPD_APPROX_LOG_BOUND,
    coarse_helly_details,
    mvee_certified,
    spd_to_polytope,
)

SQUARE = PolyNorm.from_vertices([[1, 1], [1, -1]])
DISC = SpdNorm(np.eye(2))
CROSS2 = PolyNorm.from_vertices([[1, 0], [0, 1]])


def random_polygon(rng, k=None):
    k = k or int(rng.integers(4, 9))
    ang = np.sort(rng.uniform(0, np.pi, size=k))
    rad = rng.uniform(0.5, 2.0, size=k)
    pts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    return PolyNorm.from_vertices(pts)


def random_symmetric_polytope3(rng, k=8):
    pts = rng.standard_normal((k, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None] / rng.uniform(0.6, 1.8, size=(k, 1)).ravel()[:, None]
    return PolyNorm.from_vertices(pts)


def random_spd(rng, n):
    g = rng.standard_normal((n, n))
    return SpdNorm(g.T @ g + 0.25 * np.eye(n))


# -- construction guards --

def test_spd_validation():
    with pytest.raises(UsageError):
        SpdNorm([[1, 0.1], [0, 1]])  # asymmetric beyond 1e-12
    with pytest.raises(UsageError):
        SpdNorm([[1, 0], [0, -1]])  # not positive definite


def test_polynorm_validation():
    with pytest.raises(UsageError):
        PolyNorm([[1, 0], [0, 1]], [1, 1], [[2, 0]])  # vertex escapes a facet
    with pytest.raises(UsageError):
        PolyNorm([[1, 0], [0, 1]], [1, -1], [[0.5, 0.5]])  # negative offset
    with pytest.raises(UsageError):
        PolyNorm([[1, 0]], [1], [[1, 0], [-1, 0]])  # vertices do not span


# -- gauge --

def test_gauge_examples():
    assert gauge(SQUARE, [1, 1]) == pytest.approx(1.0)
    assert gauge(DISC, [3, 4]) == pytest.approx(5.0)
    assert gauge(SQUARE, [0, 0]) == 0.0


def test_gauge_homogeneous():
    rng = helpers.rng_for(400)
    body = random_polygon(rng)
    v = rng.standard_normal(2)
    assert gauge(body, 3.5 * v) == pytest.approx(3.5 * gauge(body, v))
    assert gauge(body, -v) == pytest.approx(gauge(body, v))


def test_gauge_membership_matches_lp():
    rng = helpers.rng_for(401)
    body = random_polygon(rng)
    a = np.vstack([body.a, -body.a])
    b = np.concatenate([body.b, body.b])
    for _ in range(40):
        v = 2.0 * rng.standard_normal(2)
        inside_lp = bool(np.all(a @ v <= b + 1e-12))
        assert inside_lp == (gauge(body, v) <= 1 + 1e-12)


# -- distances --

def test_flat_identity_diagonal_spd():
    m = np.array([1.0, -3.0])
    a1 = SpdNorm(np.diag(np.exp(2 * m)))
    a2 = SpdNorm(np.eye(2))
    assert gi_distance_bodies(a1, a2) == pytest.approx(3.0, abs=1e-12)


def test_flat_identity_random_weights():
    rng = helpers.rng_for(402)
    for n in (2, 3):
        for _ in range(20):
            m1 = rng.uniform(-2, 2, size=n)
            m2 = rng.uniform(-2, 2, size=n)
            k1 = SpdNorm(np.diag(np.exp(2 * m1)))
            k2 = SpdNorm(np.diag(np.exp(2 * m2)))
            assert gi_distance_bodies(k1, k2) == pytest.approx(
                np.max(np.abs(m1 - m2)), abs=1e-9
            )


def test_distance_zero_and_symmetry():
    rng = helpers.rng_for(403)
    for make in (lambda: random_spd(rng, 2), lambda: random_polygon(rng)):
        k = make()
        assert gi_distance_bodies(k, k) <= 1e-12
    a, b = random_spd(rng, 2), random_polygon(rng)
    assert gi_distance_bodies(a, b) == pytest.approx(gi_distance_bodies(b, a), abs=1e-9)


def test_disc_vs_square():
    assert gi_distance_bodies(DISC, SQUARE) == pytest.approx(0.5 * math.log(2), abs=1e-12)


def test_metric_axioms_mixed_triples():
    rng = helpers.rng_for(404)
    for _ in range(15):
        ks = [random_spd(rng, 2), random_polygon(rng), random_polygon(rng)]
        d01 = gi_distance_bodies(ks[0], ks[1])
        d02 = gi_distance_bodies(ks[0], ks[2])
        d12 = gi_distance_bodies(ks[1], ks[2])
        assert d01 >= 0 and d02 >= 0 and d12 >= 0
        assert d02 <= d01 + d12 + 1e-7


def test_eigen_formula_dominates_sampling():
    rng = helpers.rng_for(405)
    for trial in range(10):
        k1, k2 = random_spd(rng, 2), random_spd(rng, 2)
        d = gi_distance_bodies(k1, k2)
        s = sampled_sup_ratio(k1, k2, 100_000, seed=trial)
        assert s <= d + 1e-9
        assert d - s <= 0.01


def test_sampled_ratio_identical_bodies():
    assert sampled_sup_ratio(SQUARE, SQUARE, 1000, seed=1) == 0.0


def test_sampled_ratio_disc_square():
    s = sampled_sup_ratio(DISC, SQUARE, 100_000, seed=7)
    assert abs(s - 0.5 * math.log(2)) < 0.01


def test_sampled_ratio_monotone_in_sample_count():
    # the PCG64 stream makes smaller samples prefixes of larger ones
    rng = helpers.rng_for(416)
    k1, k2 = random_spd(rng, 2), random_polygon(rng)
    vals = [sampled_sup_ratio(k1, k2, n, seed=3) for n in (100, 1000, 10_000)]
    assert vals[0] <= vals[1] <= vals[2]


# -- polar --

def test_polar_cube_cross():
    p = polar(SQUARE)
    assert gi_distance_bodies(p, CROSS2) <= 1e-12
    again = polar(p)
    assert gi_distance_bodies(again, SQUARE) <= 1e-12


def test_polar_gauge_duality():
    rng = helpers.rng_for(406)
    body = random_polygon(rng)
    pol = polar(body)
    full = np.vstack([body.vertices, -body.vertices])
    for _ in range(1000):
        u = rng.standard_normal(2)
        expect = np.max(full @ u)
        assert gauge(pol, u) == pytest.approx(expect, rel=1e-9, abs=1e-12)


# -- mvee --

def test_mvee_square_vertices():
    ell = mvee([[1, 1], [1, -1]])
    # disc of radius sqrt(2): matrix I/2
    assert np.allclose(ell.matrix, np.eye(2) / 2, atol=1e-7)


def test_mvee_axis_aligned_ellipse_recovered():
    th = np.arange(7) * np.pi / 7
    pts = np.stack([3 * np.cos(th), 0.5 * np.sin(th)], axis=1)
    ell, info = mvee_certified(pts)
    assert info["eps"] <= 1e-6
    assert np.allclose(ell.matrix, np.diag([1 / 9, 4.0]), atol=1e-6)


def test_mvee_random_certificate():
    rng = helpers.rng_for(407)
    for n in (2, 3):
        pts = rng.standard_normal((20, n))
        ell, info = mvee_certified(pts)
        assert info["eps"] <= 1e-6
        g = gauge(ell, pts)
        assert np.max(g) <= 1 + 1e-9  # containment is exact after rescaling


def test_mvee_degenerate_raises():
    with pytest.raises(UsageError):
        mvee([[1, 0], [2, 0], [-1, 0]])


def test_mvee_matches_sdp_oracle():
    cp = pytest.importorskip("cvxpy")
    rng = helpers.rng_for(417)
    for n in (2, 3):
        pts = rng.standard_normal((12, n))
        amat = cp.Variable((n, n), PSD=True)
        cons = [cp.quad_form(p, amat) <= 1 for p in pts]
        prob = cp.Problem(cp.Maximize(cp.log_det(amat)), cons)
        prob.solve()
        assert prob.status == "optimal"
        ours, info = mvee_certified(pts)
        assert info["eps"] <= 1e-6
        # agreement is limited by the SDP solver's own feasibility tolerance
        assert np.max(np.abs(amat.value - ours.matrix)) < 1e-4


def test_spd_distance_matches_lapack_generalized_eig():
    from scipy.linalg import eigh as scipy_eigh

    rng = helpers.rng_for(418)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        k1, k2 = random_spd(rng, n), random_spd(rng, n)
        lam = scipy_eigh(k1.matrix, k2.matrix, eigvals_only=True)
        oracle = 0.5 * np.max(np.abs(np.log(lam)))
        assert gi_distance_bodies(k1, k2) == pytest.approx(oracle, abs=1e-10)


# -- john ellipsoid --

def test_john_square_is_unit_disc():
    ell = john_ellipsoid(SQUARE)
    assert np.allclose(ell.matrix, np.eye(2), atol=1e-7)
    assert gi_distance_bodies(ell, SQUARE) == pytest.approx(
        math.log(math.sqrt(2)), abs=1e-6
    )


def test_john_cross_polytope():
    ell = john_ellipsoid(CROSS2)
    # inscribed disc of radius 1/sqrt(2): matrix 2 I
    assert np.allclose(ell.matrix, 2 * np.eye(2), atol=1e-6)


def test_john_bound_random_2d_3d():
    rng = helpers.rng_for(408)
    for _ in range(10):
        body = random_polygon(rng)
        ell = john_ellipsoid(body)
        assert gi_distance_bodies(ell, body) <= math.log(math.sqrt(2)) + 1e-6
    for _ in range(5):
        body = random_symmetric_polytope3(rng)
        ell = john_ellipsoid(body)
        assert gi_distance_bodies(ell, body) <= math.log(math.sqrt(3)) + 1e-6


def test_john_inscribed_facet_condition():
    rng = helpers.rng_for(409)
    body = random_polygon(rng)
    ell = john_ellipsoid(body)
    q = np.linalg.inv(ell.matrix)
    vals = np.sum((body.a @ q) * body.a, axis=1)
    assert np.all(vals <= body.b ** 2 * (1 + 1e-6))


# -- spd approximation and intersection witness --

def test_spd_to_polytope_error_bound():
    rng = helpers.rng_for(410)
    for n in (2, 3):
        for _ in range(3):
            ell = random_spd(rng, n)
            poly = spd_to_polytope(ell)
            d = gi_distance_bodies(poly, ell)
            assert d <= SPD_APPROX_LOG_BOUND[n]


def test_witness_identical_bodies_radius_zero():
    w = coarse_helly_witness_bodies([SQUARE, SQUARE], [0.0, 0.0])
    assert gi_distance_bodies(w, SQUARE) <= 1e-6


def test_witness_scaled_copies():
    k1 = SQUARE
    k2 = PolyNorm.from_vertices(2.0 * np.asarray(SQUARE.vertices))
    r = 0.5 * math.log(2)
    details = coarse_helly_details([k1, k2], [r, r])
    w = details["witness"]
    # witness is sqrt(2) K1, at distance exactly r from both
    assert gi_distance_bodies(w, k1) == pytest.approx(r, abs=1e-9)
    assert gi_distance_bodies(w, k2) == pytest.approx(r, abs=1e-9)


def test_witness_random_polygon_families():
    rng = helpers.rng_for(411)
    for _ in range(15):
        fam = [random_polygon(rng) for _ in range(int(rng.integers(3, 6)))]
        dmat = [[gi_distance_bodies(a, b) for b in fam] for a in fam]
        radii = [max(row) / 2 + 0.05 for row in dmat]
        details = coarse_helly_details(fam, radii)
        for d, allowed in zip(details["distances"], details["allowed"]):
            assert d <= allowed


def test_witness_mixed_spd_polytope():
    rng = helpers.rng_for(412)
    fam = [random_spd(rng, 2), random_polygon(rng), random_polygon(rng)]
    dmat = [[gi_distance_bodies(a, b) for b in fam] for a in fam]
    radii = [max(row) / 2 + 0.05 for row in dmat]
    details = coarse_helly_details(fam, radii)
    assert details["approx_slack"][0] == SPD_APPROX_LOG_BOUND[2]
    for d, allowed in zip(details["distances"], details["allowed"]):
        assert d <= allowed


def test_witness_3d_polytopes():
    rng = helpers.rng_for(413)
    cube = PolyNorm.from_vertices([[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]])
    octa = PolyNorm.from_vertices([[1.3, 0, 0], [0, 1.1, 0], [0, 0, 0.9]])
    rnd = random_symmetric_polytope3(rng, 7)
    fam = [cube, octa, rnd]
    dmat = [[gi_distance_bodies(a, b) for b in fam] for a in fam]
    radii = [max(row) / 2 + 0.05 for row in dmat]
    details = coarse_helly_details(fam, radii)
    for d, allowed in zip(details["distances"], details["allowed"]):
        assert d <= allowed


def test_witness_3d_with_spd_input():
    rng = helpers.rng_for(414)
    cube = PolyNorm.from_vertices([[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]])
    ell = random_spd(rng, 3)
    fam = [ell, cube]
    dmat = [[gi_distance_bodies(a, b) for b in fam] for a in fam]
    radii = [max(row) / 2 + 0.05 for row in dmat]
    details = coarse_helly_details(fam, radii)
    assert details["approx_slack"][0] == SPD_APPROX_LOG_BOUND[3]
    for d, allowed in zip(details["distances"], details["allowed"]):
        assert d <= allowed


def test_mvee_anisotropic_inputs():
    rng = helpers.rng_for(415)
    for scale in (1e2, 1e3):
        pts = rng.standard_normal((25, 2)) * np.array([scale, 1.0 / scale])
        _, info = mvee_certified(pts)
        assert info["eps"] <= 1e-6
        pts3 = rng.standard_normal((30, 3)) * np.array([scale, 1.0, 1.0 / scale])
        _, info = mvee_certified(pts3)
        assert info["eps"] <= 1e-6


def test_witness_violation_reports_pair():
    far = PolyNorm.from_vertices(100.0 * np.asarray(SQUARE.vertices))
    with pytest.raises(PairwiseRadiusError) as exc:
        coarse_helly_witness_bodies([SQUARE, far], [0.1, 0.1])
    assert exc.value.pair == (0, 1)


# -- invariance --

ROT90 = [[0.0, -1.0], [1.0, 0.0]]
ROT45 = [[math.cos(math.pi / 4), -math.sin(math.pi / 4)],
         [math.sin(math.pi / 4), math.cos(math.pi / 4)]]


def test_invariance_square():
    act = LinearGroupAction([ROT90])
    assert act.order() == 4
    assert is_invariant(SQUARE, act)
    assert not is_invariant(SQUARE, LinearGroupAction([ROT45]))
    assert is_invariant(DISC, LinearGroupAction([ROT45]))


def test_invariant_inputs_give_invariant_witness():
    act = LinearGroupAction([ROT90])
    k2 = PolyNorm.from_vertices(1.5 * np.asarray(SQUARE.vertices))
    disc_poly = spd_to_polytope(SpdNorm(0.8 * np.eye(2)))
    fam = [SQUARE, k2, disc_poly]
    assert all(is_invariant(k, act) for k in fam)
    dmat = [[gi_distance_bodies(a, b) for b in fam] for a in fam]
    radii = [max(row) / 2 + 0.01 for row in dmat]
    w = coarse_helly_witness_bodies(fam, radii)
    assert is_invariant(w, act)


def test_group_closure_cap():
    irrational = [[math.cos(0.1), -math.sin(0.1)], [math.sin(0.1), math.cos(0.1)]]
    with pytest.raises(UsageError):
        LinearGroupAction([irrational]).elements()


# -- serialization --

def test_body_json_roundtrip():
    for body in (SQUARE, DISC):
        doc = body_to_json(body)
        again = body_from_json(doc)
        assert gi_distance_bodies(body, again) <= 1e-12
    with pytest.raises(UsageError):
        body_from_json({"kind": "mystery"})


def test_json_floats_roundtrip_exactly():
    import json

    body = SpdNorm([[1 / 3, 0.0], [0.0, math.pi]])
    doc = json.loads(json.dumps(body_to_json(body)))
    again = body_from_json(doc)
    assert np.array_equal(again.matrix, body.matrix)
