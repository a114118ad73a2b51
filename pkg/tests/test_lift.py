import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kahlerlift import geometry as G
from kahlerlift import jets as J
from kahlerlift import lift as L
from kahlerlift.rng import SplitMix64

BASES = sorted(G.BASE_NAMES) + sorted(G.PRODUCT_NAMES)
seeds = st.integers(0, 2**32)


def lifted(name, seed=11, count=4):
    tg = L.lift_geometry(G.catalog(name))
    return tg, tg.sample(SplitMix64(seed), count)


def nonconstant_field(x):
    return J.stack([1.0 + x[0] * x[1], x[0] * x[0]])


def test_wedge_convention():
    e = np.eye(2)
    w = L.wedge(e[0], e[1])
    # (a ^ b)(u, v) = a(v) b(u) - a(u) b(v)
    u, v = np.array([1.0, 2.0]), np.array([-0.5, 3.0])
    assert u @ w @ v == pytest.approx(v[0] * u[1] - u[0] * v[1])
    np.testing.assert_array_equal(w, -w.T)


@pytest.mark.parametrize("name", BASES)
def test_metric_and_compatibility_identities(name):
    tg, pts = lifted(name)
    for p in pts:
        assert L.metric_identity_residual(tg, p) < 1e-10
        res = L.compatibility_audit(tg, p)
        assert max(res.values()) < 1e-9, res
        assert L.liouville_pullback_audit(tg, p) < 1e-9


@pytest.mark.parametrize("name", BASES)
def test_lifted_signature_is_neutral(name):
    tg, pts = lifted(name, count=8)
    half = tg.dim // 2
    for p in pts:
        assert L.signature(tg.g_tilde(p)) == (half, half)


@given(seeds, st.sampled_from(BASES))
def test_j_tilde_squares_to_minus_eps(seed, name):
    tg = L.TangentGeometry(G.catalog(name))
    p = tg.sample(SplitMix64(seed), 1)[0]
    jt = tg.j_tilde(p)
    assert G.max_abs(jt @ jt + tg.epsilon * np.eye(tg.dim)) < 1e-12
    np.testing.assert_allclose(L.almost_j_tilde_matrix(tg.base, p), jt, atol=1e-13)


@given(seeds)
def test_split_round_trip(seed):
    tg = L.TangentGeometry(G.catalog("hyperbolic"))
    rng = SplitMix64(seed)
    p = tg.sample(rng, 1)[0]
    v = rng.uniform(-1, 1, 4)
    s = L.split(tg, p, v)
    np.testing.assert_allclose(L.reassemble(tg, p, s), v, atol=1e-14)
    X = v[:2]
    assert G.max_abs(L.split(tg, p, L.horizontal_lift(tg, p, X)).k) < 1e-14
    assert G.max_abs(L.split(tg, p, L.vertical_lift(tg, p, X)).pi) == 0.0


@pytest.mark.parametrize("name", ["sphere", "hyperbolic", "de_sitter", "bump"])
def test_bracket_identities(name):
    tg, pts = lifted(name)
    e = np.eye(2)
    pairs = [(L_const(e[0]), L_const(e[1])), (nonconstant_field, L_const(e[1])),
             (L_const(e[1]), nonconstant_field)]
    for p in pts:
        for X, Y in pairs:
            res = L.bracket_audit(tg, X, Y, p)
            assert max(res.values()) < 1e-7, res


def L_const(vec):
    from kahlerlift.curvature import constant_field

    return constant_field(vec)


def test_bracket_curvature_term_is_not_trivial():
    # on the sphere the horizontal bracket has a nonzero vertical part -R(X, Y) xi
    tg = L.TangentGeometry(G.catalog("sphere"))
    p = np.array([0.2, 0.1, 0.7, -0.4])
    P = J.variables(p, 1)
    e = np.eye(2)
    Xh, _ = L._lifted_field_jets(tg, L_const(e[0]), P)
    Yh, _ = L._lifted_field_jets(tg, L_const(e[1]), P)
    assert G.max_abs(L.split(tg, p, L._bracket(Xh, Yh)).k) > 0.1


def test_chart_invariance_and_fault_injection(monkeypatch):
    geom = L.rotation_field_structure()
    phi = L.PolynomialMap.quadratic_example(0.1)
    tg = L.TangentGeometry(geom)
    pts = tg.sample(SplitMix64(4), 6)
    assert max(L.chart_invariance_audit(geom, phi, p) for p in pts) < 1e-7

    def without_fibre_term(g, p):
        d = g.dim
        j = g.j(np.asarray(p)[:d])
        return np.block([[j, np.zeros((d, d))], [np.zeros((d, d)), j]])

    monkeypatch.setattr(L, "almost_j_tilde_matrix", without_fibre_term)
    assert max(L.chart_invariance_audit(geom, phi, p) for p in pts) > 1e-3


def test_chart_invariance_on_kahler_base():
    geom = G.catalog("bump")
    phi = L.PolynomialMap.quadratic_example(0.05)
    tg = L.TangentGeometry(geom)
    for p in tg.sample(SplitMix64(8), 4):
        assert L.chart_invariance_audit(geom, phi, p) < 1e-7


def test_nonintegrable_structure():
    geom = L.nonintegrable_structure(0.4)
    tg = L.TangentGeometry(geom)
    pts = tg.sample(SplitMix64(2), 6)
    assert max(G.max_abs(L.nijenhuis(geom, p[:4])) for p in pts) > 0.1
    for p in pts:
        m = L.almost_j_tilde_matrix(geom, p)
        assert G.max_abs(m @ m + np.eye(8)) < 1e-9
    with pytest.raises(L.LiftError, match="not Kähler"):
        L.lift_geometry(geom)


def test_rotation_field_structure_is_integrable():
    geom = L.rotation_field_structure()
    for x in geom.sample(SplitMix64(1), 4):
        assert G.max_abs(L.nijenhuis(geom, x)) < 1e-12


def test_polynomial_map_inverse_jet():
    phi = L.PolynomialMap.quadratic_example(0.2)
    y0 = np.array([0.3, -0.1])
    psi = phi.inverse_jet(y0, 2)
    back = phi(psi)
    ident = J.variables(y0, 2)
    np.testing.assert_allclose(back.coeffs, ident.coeffs, atol=1e-12)
    # the Newton step differentiates phi once more, so order 3 would need 4
    with pytest.raises(J.JetError):
        phi.inverse_jet(y0, 3)


@pytest.mark.parametrize("which", ["complex", "para"])
def test_symplectic_identifications(which):
    assert L.symplectic_identification_audit(which) < 1e-14
    # the normalization matters: without the sqrt(2)/2 factor the forms differ by O(1)
    assert L.symplectic_identification_audit(which, scale=1.0) > 0.5


def test_identification_unknown_name():
    with pytest.raises(L.LiftError):
        L.identification("quaternionic")


def test_canonical_form_matches_flat_lift():
    tg = L.TangentGeometry(G.catalog("flat_c"))
    np.testing.assert_array_equal(L.canonical_form(2), tg.omega(np.zeros(4)))


def test_signature_rejects_degenerate():
    with pytest.raises(L.LiftError):
        L.signature(np.diag([1.0, 0.0]))


def test_fibre_domain():
    tg = L.TangentGeometry(G.catalog("hyperbolic"))
    for p in tg.sample(SplitMix64(0), 20):
        assert p[:2] @ p[:2] < 0.81
        assert np.all(np.abs(p[2:]) <= L.FIBRE_HALF_WIDTH)
    assert math.isclose(tg.as_geometry().g(p)[0, 2], tg.g_tilde(p)[0, 2])
