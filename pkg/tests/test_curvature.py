import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kahlerlift import curvature as C
from kahlerlift import geometry as G
from kahlerlift import lift as L
from kahlerlift.rng import SplitMix64

SURFACES = sorted(G.BASE_NAMES)
CURVED = ["sphere", "hyperbolic", "de_sitter", "bump", "para_bump"]
CONSTANT = ["sphere", "hyperbolic", "de_sitter"]
seeds = st.integers(0, 2**32)

# Rm~ of the lift of sphere(1) at (x, y, xi1, xi2) = (0.3, -0.2, 0.5, -0.25),
# computed by tools/derive_oracles.py from the hand-written lifted metric.
SPHERE_LIFT_POINT = np.array([0.3, -0.2, 0.5, -0.25])
SPHERE_LIFT_RM = {(0, 1, 0, 1): 1.7368317951982344674, (0, 1, 0, 3): 0.0, (0, 2, 1, 3): 0.0, (0, 1, 2, 3): 0.0}


def lifted(name, seed=5, count=3):
    tg = L.lift_geometry(G.catalog(name))
    return tg, tg.sample(SplitMix64(seed), count)


def test_rm_tilde_matches_sympy_values():
    tg = L.lift_geometry(G.catalog("sphere"))
    rm = C.rm_tilde_tensor(tg, SPHERE_LIFT_POINT).formula
    for idx, val in SPHERE_LIFT_RM.items():
        assert rm[idx] == pytest.approx(val, rel=1e-13, abs=1e-14)


@pytest.mark.parametrize("name", SURFACES + ["sphere_product", "para_product"])
def test_rm_tilde_formula_matches_chart_oracle(name):
    tg, pts = lifted(name, count=2)
    for p in pts:
        assert C.rm_tilde_tensor(tg, p).discrepancy < 1e-6


@pytest.mark.parametrize("name", CURVED)
def test_literal_last_sign_disagrees_with_oracle(name):
    tg, pts = lifted(name, count=2)
    worst = max(C.rm_tilde_tensor(tg, p, literal_last_sign=True, strict=False).discrepancy for p in pts)
    assert worst > 1e-2
    with pytest.raises(C.OracleMismatch):
        C.rm_tilde_tensor(tg, pts[0], literal_last_sign=True)


@pytest.mark.parametrize("name", ["flat_c", "flat_d", "flat_product"])
def test_flat_base_gives_flat_lift(name):
    tg, pts = lifted(name)
    for p in pts:
        assert G.max_abs(C.rm_tilde_tensor(tg, p).formula) < 1e-9


@given(seeds, st.sampled_from(SURFACES + ["sphere_product"]))
def test_ricci_and_scalar(seed, name):
    tg = L.TangentGeometry(G.catalog(name))
    p = tg.sample(SplitMix64(seed), 1)[0]
    ric = C.ric_scal_tilde(tg, p)
    assert ric.residual < 1e-7
    assert abs(ric.scalar) < 1e-7


def test_sphere_ricci_is_twice_metric_on_horizontals():
    tg, pts = lifted("sphere")
    for p in pts:
        ric = C.ric_scal_tilde(tg, p).ricci
        g = tg.base.g(p[:2])
        h = [L.horizontal_lift(tg, p, e) for e in np.eye(2)]
        v = [L.vertical_lift(tg, p, e) for e in np.eye(2)]
        for a in range(2):
            for b in range(2):
                assert h[a] @ ric @ h[b] == pytest.approx(2 * g[a, b])
                assert abs(v[a] @ ric @ h[b]) < 1e-12
                assert abs(v[a] @ ric @ v[b]) < 1e-12


def test_einstein_residual():
    tg, pts = lifted("sphere", count=8)
    assert C.einstein_residual(tg, pts)[1] > 0.1
    tg, pts = lifted("flat_c", count=8)
    assert C.einstein_residual(tg, pts)[1] < 1e-12
    with pytest.raises(ValueError):
        C.einstein_residual(tg, pts[:3])


def fields(d):
    def s(x):
        from kahlerlift import jets as J

        return J.stack([x[0] * x[1], 1.0 + x[0] * x[0]])

    zero = C.constant_field(np.zeros(d))
    frame = [C.coordinate_projectable(d, i, v) for i in range(d) for v in (False, True)]
    return frame + [C.ProjectableField(s, zero), C.ProjectableField(zero, s), C.ProjectableField(s, s)]


@pytest.mark.parametrize("name", CURVED)
def test_nabla_tilde_matches_oracle(name):
    tg, pts = lifted(name, count=2)
    frame = fields(2)
    for p in pts:
        at = C.NablaAtPoint(tg, p)
        for X in frame:
            for Y in frame:
                assert C.nabla_tilde(tg, p, X, Y, at=at).discrepancy < 1e-7
        for i in range(2):
            o = at.oracle(C.coordinate_projectable(2, i, True), frame[-1])
            assert max(G.max_abs(o.pi), G.max_abs(o.k)) < 1e-12


def test_nabla_tilde_fault_injection(monkeypatch):
    tg, pts = lifted("sphere", count=1)
    X = C.coordinate_projectable(2, 0, False)
    Y = C.coordinate_projectable(2, 1, False)
    C.nabla_tilde(tg, pts[0], X, Y)

    def no_t1(geom, x):
        return G.PointTensor(np.zeros((2, 2, 2, 2)), "dddu", np.asarray(x))

    monkeypatch.setattr(C, "t1_tensor", no_t1)
    with pytest.raises(C.OracleMismatch):
        C.nabla_tilde(tg, pts[0], X, Y)


@pytest.mark.parametrize("name", SURFACES)
def test_j_tilde_is_parallel(name):
    tg, pts = lifted(name, count=2)
    for p in pts:
        res = C.j_tilde_parallel_audit(tg, p)
        assert max(res.values()) < 1e-7, res


@pytest.mark.parametrize("name", CURVED)
def test_surface_t1_specialization(name, rng):
    geom = G.catalog(name)
    for x in geom.sample(SplitMix64(9), 3):
        c = G.gaussian_curvature(G.curvature_suite(geom, x))
        t = C.t1_tensor(geom, x)
        for _ in range(3):
            X, Y, V = rng.normal(size=(3, 2))
            general = t(X, Y, V)
            assert G.max_abs(general - C.surface_t1(geom, x, X, Y, V, c)) < 1e-9
            literal = C.surface_t1(geom, x, X, Y, V, c, literal=True)
            assert G.max_abs(general - literal) > 1e-3 * max(1.0, G.max_abs(general))


def test_surface_t1_orthonormal_example():
    geom = G.catalog("sphere")
    x = np.array([0.2, -0.4])
    e1, e2 = G.unit_pair(geom, x)
    got = C.t1(geom, x, e1, e2, e1)
    np.testing.assert_allclose(got, -e2, atol=1e-12)


def test_flat_t1_vanishes():
    geom = G.catalog("flat_d")
    assert G.max_abs(C.t1_tensor(geom, [0.1, 0.2]).components) == 0.0


@given(st.integers(0, 2**32))
def test_kulkarni_nomizu_has_curvature_symmetries(seed):
    rng = np.random.default_rng(seed)
    A, B = rng.normal(size=(2, 4, 4))
    A, B = A + A.T, B + B.T
    kn = C.kulkarni_nomizu(A, B)
    assert G.max_abs(kn + kn.transpose(1, 0, 2, 3)) < 1e-12
    assert G.max_abs(kn - kn.transpose(2, 3, 0, 1)) < 1e-12
    assert G.max_abs(kn + kn.transpose(1, 2, 0, 3) + kn.transpose(2, 0, 1, 3)) < 1e-12
    np.testing.assert_allclose(kn, C.kulkarni_nomizu(B, A), atol=1e-12)


@given(seeds, st.sampled_from(["sphere_product", "para_product"]))
def test_weyl_direct_is_traceless(seed, name):
    geom = G.catalog(name)
    x = geom.sample(SplitMix64(seed), 1)[0]
    s = G.curvature_suite(geom, x)
    W = C.weyl_direct(s.riemann_0_4, s.ricci, s.scalar, s.metric)
    assert G.max_abs(np.einsum("ik,ijkl->jl", s.metric_inverse, W)) < 1e-10


@pytest.mark.parametrize("name", SURFACES)
def test_weyl_three_way(name):
    tg, pts = lifted(name, count=2)
    for p in pts:
        res = C.weyl_tilde_tensor(tg, p)
        assert max(res.residuals.values()) < 1e-6, res.residuals
        if name in CONSTANT or name.startswith("flat"):
            assert res.max_component < 1e-7


@pytest.mark.parametrize("name", ["bump", "para_bump"])
def test_weyl_nonzero_for_variable_curvature(name):
    tg, pts = lifted(name, count=8)
    assert max(C.weyl_tilde_tensor(tg, p).max_component for p in pts) > 1e-3


def test_weyl_for_products():
    tg, pts = lifted("flat_product", count=2)
    assert max(C.weyl_tilde_tensor(tg, p).max_component for p in pts) < 1e-9
    tg, pts = lifted("sphere_product", count=2)
    assert max(C.weyl_tilde_tensor(tg, p).max_component for p in pts) > 1e-3


def test_point_evaluators():
    tg, pts = lifted("bump", count=1)
    e = np.eye(4)
    f, o, diff = C.rm_tilde(tg, pts[0], e[0], e[1], e[0], e[1])
    assert diff < 1e-9 * max(1.0, abs(o))
    w = C.weyl_tilde(tg, pts[0], e[0], e[1], e[0], e[1])
    assert np.isfinite(w)


@pytest.mark.parametrize("name", CURVED)
def test_holomorphic_sectional_identities(name):
    tg, pts = lifted(name, count=3)
    X, Y = np.array([1.0, 1.0]), np.array([0.3, -1.0])
    for p in pts:
        res = C.hol_identity_audit(tg, p, X, Y)
        assert res["vertical"] < 1e-10
        assert max(res.values()) < 1e-7, res


@pytest.mark.parametrize("name", ["bump", "para_bump"])
def test_literal_diagonal_reading_fails_off_constant_curvature(name):
    tg, pts = lifted(name, count=8)
    X, Y = np.array([1.0, 1.0]), np.array([0.3, -1.0])
    worst = max(C.hol_identity_audit(tg, p, X, Y, literal=True)["diagonal"] for p in pts)
    assert worst > 1e-3


def test_hol_tilde_is_not_pointwise_constant_on_sphere():
    tg, pts = lifted("sphere", count=2)
    X = np.array([1.0, 0.0])
    for p in pts:
        jX = tg.base.j(p[:2]) @ X
        vert = C.hol_tilde(tg, p, L.vertical_lift(tg, p, X))
        mixed = C.hol_tilde(tg, p, L.lift_vector(tg, p, X, jX))
        assert abs(vert) < 1e-10
        assert abs(mixed - vert) > 1e-3
        assert mixed == pytest.approx(4 * C.base_hol(tg.base, p[:2], X))
