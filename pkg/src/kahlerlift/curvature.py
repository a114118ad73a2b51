"""Closed-form curvature of the lifted metric, each cross-checked against the direct chart.

The closed forms are written in terms of base data at ``x`` and the fibre
point ``V = xi``:

* ``T1(X, Y, V) = (R(X,Y)V - eps R(V, jX) jY - eps R(V, jY) jX) / 2``
* ``T2(X, Y, Z, V) = (nabla_X T1)(Y, Z, V) - (nabla_Y T1)(X, Z, V)``
* ``Rm~(A, B, C, D) = g(T2(PiA, PiB, PiC, V), j PiD) - Rm(PiA, PiB, PiC, jKD)
  - Rm(PiA, PiB, jKC, PiD) - Rm(PiA, jKB, PiC, PiD) - Rm(jKA, PiB, PiC, PiD)``

The sign of the last term is the one forced by the antisymmetry of ``Rm~``
in its first two slots; ``literal_last_sign=True`` reproduces the opposite
sign so the discrepancy can be demonstrated.

The "oracle" for every closed form is the same quantity computed by
feeding ``g~`` to :func:`kahlerlift.geometry.curvature_suite` as an ordinary
``4n``-dimensional metric.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import geometry as G
from . import jets as J
from .geometry import Geometry, PointTensor, max_abs, rel_residual
from .lift import SplitVector, TangentGeometry, split

ORACLE_TOLERANCE = 1e-6
ORACLE_FLOOR = 1e-3  # relative residuals use max(|oracle|, floor) as the scale


class OracleMismatch(RuntimeError):
    """A closed-form value disagrees with its direct-chart oracle."""


# ---------------------------------------------------------------------------
# base tensors T1, T2
# ---------------------------------------------------------------------------
def _t1_components(r13, j, eps):
    """``T1[a, b, v, l]``: ``T1(d_a, d_b, d_v) = T1[a, b, v, l] d_l``."""
    r_jj = J.einsum("ma,nb,vmnl->abvl", j, j, r13)
    return 0.5 * (r13 - eps * r_jj - eps * r_jj.transpose(1, 0, 2, 3))


def t1_tensor(geom: Geometry, x) -> PointTensor:
    x = np.asarray(x, dtype=float)
    comps = _t1_components(G.riemann_field(geom, x), geom.j(x), geom.epsilon)
    return PointTensor(comps, "dddu", x)


def t1(geom: Geometry, x, X, Y, V) -> np.ndarray:
    """``T1(X, Y, V)`` at ``x``."""
    return t1_tensor(geom, x)(X, Y, V)


def _t1_field(geom: Geometry) -> Callable:
    def field(xjet):
        r13 = G.riemann_field(geom, xjet)
        j = G.as_jet(geom.structure(xjet), xjet.basis)
        return _t1_components(r13, j, geom.epsilon)

    return field


def t2_tensor(geom: Geometry, x) -> PointTensor:
    """``T2[a, b, c, v, l]`` from the covariant derivative of the ``T1`` field."""
    x = np.asarray(x, dtype=float)
    nab = G.nabla_tensor(geom, _t1_field(geom), x, "dddu").components
    return PointTensor(nab - nab.transpose(1, 0, 2, 3, 4), "ddddu", x)


def t2(geom: Geometry, x, X, Y, Z, V) -> np.ndarray:
    """``T2(X, Y, Z, V)`` at ``x``."""
    return t2_tensor(geom, x)(X, Y, Z, V)


def surface_t1(geom: Geometry, x, X, Y, V, c: float, literal: bool = False) -> np.ndarray:
    """``T1`` on a surface of Gaussian curvature ``c``.

    Substituting ``R(X, Y)V = c (g(Y, V) X - g(X, V) Y)`` into the general
    formula gives ``-c g(V, X) Y`` for both signs of ``eps`` (for ``eps = -1``
    use that ``g(Y,V)X + g(X,V)Y - 2g(X,Y)V - g(V,jY)jX - g(V,jX)jY`` vanishes
    on a para-Hermitian plane, as one checks on a null basis).  With
    ``literal=True`` the forms ``-2c g(V,X)Y`` (complex) and ``+2c g(V,Y)X``
    (para-complex) are returned instead; they do not agree with the general
    formula and are kept only to quantify that disagreement.
    """
    g = geom.g(x)
    X, Y, V = (np.asarray(a, dtype=float) for a in (X, Y, V))
    if not literal:
        return -c * (V @ g @ X) * Y
    if geom.epsilon == 1:
        return -2 * c * (V @ g @ X) * Y
    return 2 * c * (V @ g @ Y) * X


def kulkarni_nomizu(A, B) -> np.ndarray:
    """``(A ^ B)_ijkl = A_ik B_jl + A_jl B_ik - A_il B_jk - A_jk B_il``."""
    t = np.einsum("ik,jl->ijkl", A, B)
    u = np.einsum("il,jk->ijkl", A, B)
    return t + t.transpose(1, 0, 3, 2) - u - u.transpose(1, 0, 3, 2)


# ---------------------------------------------------------------------------
# point data shared by the lifted formulas
# ---------------------------------------------------------------------------
@dataclass
class LiftedPointData:
    """Base data at ``x`` and the splitting matrices at ``p = (x, xi)``."""

    p: np.ndarray
    x: np.ndarray
    xi: np.ndarray
    g: np.ndarray
    j: np.ndarray
    eps: int
    pi: np.ndarray  # (2n, 4n)
    k: np.ndarray  # (2n, 4n)
    suite: G.CurvatureSuite
    t2: np.ndarray | None = None


def point_data(tg: TangentGeometry, p, with_t2: bool = True) -> LiftedPointData:
    base = tg.base
    d = base.dim
    p = np.asarray(p, dtype=float)
    x, xi = p[:d], p[d:]
    gx = tg.gamma_xi(p)
    pi = np.hstack([np.eye(d), np.zeros((d, d))])
    k = np.hstack([gx, np.eye(d)])
    suite = G.curvature_suite(base, x)
    t2c = t2_tensor(base, x).components if with_t2 else None
    return LiftedPointData(p, x, xi, base.g(x), base.j(x), base.epsilon, pi, k, suite, t2c)


# ---------------------------------------------------------------------------
# connection
# ---------------------------------------------------------------------------
@dataclass
class ProjectableField:
    """``horizontal^h + vertical^v`` for two base vector fields (jet-aware callables)."""

    horizontal: Callable
    vertical: Callable

    def base_values(self, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(J.value_of(self.horizontal(x)), float), np.asarray(J.value_of(self.vertical(x)), float)

    def base_jets(self, x):
        xj = J.variables(np.asarray(x, dtype=float), 1)
        return G.as_jet(self.horizontal(xj), xj.basis), G.as_jet(self.vertical(xj), xj.basis)

    def lifted_jet(self, tg: TangentGeometry, P):
        """The field on the lifted chart as a jet in the lifted variables."""
        d = tg.base.dim
        x, xi = P[:d], P[d:]
        h = G.as_jet(self.horizontal(x), P.basis)
        v = G.as_jet(self.vertical(x), P.basis)
        gam = G.christoffel_field(tg.base, x)
        lower = v - J.einsum("kij,i,j->k", gam, h, xi)
        return J.stack([*h, *lower])

    def at(self, tg: TangentGeometry, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        h, v = self.base_values(p[: tg.base.dim])
        return np.concatenate([h, v - tg.gamma_xi(p) @ h])


def constant_field(vec) -> Callable:
    vec = np.asarray(vec, dtype=float)

    def f(x):
        if isinstance(x, J.Jet):
            return J.Jet.constant(vec, x.basis)
        return vec

    return f


def coordinate_projectable(d: int, index: int, vertical: bool) -> ProjectableField:
    e = np.eye(d)[index]
    zero = np.zeros(d)
    if vertical:
        return ProjectableField(constant_field(zero), constant_field(e))
    return ProjectableField(constant_field(e), constant_field(zero))


@dataclass
class NablaTildeResult:
    formula: SplitVector
    oracle: SplitVector
    discrepancy: float


class NablaAtPoint:
    """Data shared by every ``nabla_tilde`` evaluation at one point ``p``.

    Building the Christoffel symbols of ``g~`` dominates the cost, so they
    are computed once here (lazily, only when an oracle value is asked for).
    """

    def __init__(self, tg: TangentGeometry, p):
        self.tg = tg
        d = tg.base.dim
        self.p = np.asarray(p, dtype=float)
        self.x, self.xi = self.p[:d], self.p[d:]
        self.gamma = G.christoffel(tg.base, self.x)
        self.t1 = t1_tensor(tg.base, self.x)
        self._gamma_t = None

    @property
    def gamma_tilde(self) -> np.ndarray:
        if self._gamma_t is None:
            self._gamma_t = G.christoffel(self.tg.as_geometry(), self.p)
        return self._gamma_t

    def _base_nabla(self, Xval, Yjet):
        return G.jacobian_matrix(Yjet) @ Xval + np.einsum("kij,i,j->k", self.gamma, Xval, Yjet.value)

    def formula(self, Xbar: ProjectableField, Ybar: ProjectableField) -> SplitVector:
        X_pi = Xbar.at(self.tg, self.p)[: self.tg.base.dim]
        Y1, Y2 = Ybar.base_jets(self.x)
        first = self._base_nabla(X_pi, Y1)
        second = self._base_nabla(X_pi, Y2) - self.t1(X_pi, Y1.value, self.xi)
        return SplitVector(first, second)

    def oracle(self, Xbar: ProjectableField, Ybar: ProjectableField) -> SplitVector:
        xbar = Xbar.at(self.tg, self.p)
        Yl = Ybar.lifted_jet(self.tg, J.variables(self.p, 1))
        direct = G.jacobian_matrix(Yl) @ xbar + np.einsum("kij,i,j->k", self.gamma_tilde, xbar, Yl.value)
        return split(self.tg, self.p, direct)


def nabla_tilde(tg: TangentGeometry, p, Xbar: ProjectableField, Ybar: ProjectableField,
                strict: bool = True, at: NablaAtPoint | None = None) -> NablaTildeResult:
    """Covariant derivative of a projectable field on ``TM``, closed form and oracle.

    The closed form is ``(nabla_{PiX} PiY, nabla_{PiX} KY - T1(PiX, PiY, V))``;
    the oracle differentiates the lifted field on the chart and adds the
    Christoffel symbols of ``g~``.  Pass ``at`` to reuse point data across
    many field pairs.
    """
    at = at or NablaAtPoint(tg, p)
    formula = at.formula(Xbar, Ybar)
    oracle = at.oracle(Xbar, Ybar)
    disc = max(
        rel_residual(formula.pi, oracle.pi, ORACLE_FLOOR), rel_residual(formula.k, oracle.k, ORACLE_FLOOR)
    )
    if strict and disc > ORACLE_TOLERANCE:
        raise OracleMismatch(f"nabla_tilde disagrees with the direct chart at {at.p.tolist()}: {disc:.3e}")
    return NablaTildeResult(formula, oracle, disc)


def _j_times(geom: Geometry, field: Callable) -> Callable:
    def f(x):
        return J.einsum("ab,b->a", geom.structure(x), field(x))

    return f


def j_tilde_parallel_audit(tg: TangentGeometry, p, extra_fields=()) -> dict[str, float]:
    """``nabla~ J~ = 0`` three ways.

    'formula': ``|nabla~_X (J~ Y) - J~ nabla~_X Y|`` over a frame of projectable
    fields using the closed-form connection; 'direct': the covariant
    derivative of ``J~`` computed on the lifted chart; 't1_equivariance':
    ``|T1(X, jY, V) - j T1(X, Y, V)|`` over coordinate vectors.
    """
    base = tg.base
    d = base.dim
    p = np.asarray(p, dtype=float)
    x = p[:d]
    frame = [coordinate_projectable(d, i, v) for i in range(d) for v in (False, True)]
    frame += list(extra_fields)
    at = NablaAtPoint(tg, p)
    worst = 0.0
    for Xb in frame[: 2 * d]:
        for Yb in frame:
            JY = ProjectableField(_j_times(base, Yb.horizontal), _j_times(base, Yb.vertical))
            lhs = at.formula(Xb, JY)
            rhs = at.formula(Xb, Yb)
            # nabla~(J~Y) - J~ nabla~Y, both in split form (J~ acts as j on each part)
            worst = max(worst, max_abs(lhs.pi - base.j(x) @ rhs.pi), max_abs(lhs.k - base.j(x) @ rhs.k))
    direct = G.nabla_tensor(tg.as_geometry(), tg.j_tilde, p, "ud").components
    t1c = at.t1.components
    j = base.j(x)
    lhs = np.einsum("anvl,nb->abvl", t1c, j)  # T1(X, jY, V)
    rhs = np.einsum("lm,abvm->abvl", j, t1c)  # j T1(X, Y, V)
    return {"formula": worst, "direct": max_abs(direct), "t1_equivariance": max_abs(lhs - rhs)}


# ---------------------------------------------------------------------------
# curvature of g~
# ---------------------------------------------------------------------------
def rm_tilde_formula(data: LiftedPointData, literal_last_sign: bool = False) -> np.ndarray:
    """The closed-form ``Rm~`` as a ``4n^4`` array in chart coordinates."""
    rm = data.suite.riemann_0_4
    pi, jk = data.pi, data.j @ data.k
    t2xi = np.einsum("abcvl,v->abcl", data.t2, data.xi)
    first = np.einsum("abcl,lm,mw->abcw", t2xi, data.g, data.j)

    def pull(t, m1, m2, m3, m4):
        return np.einsum("abcd,aA,bB,cC,dD->ABCD", t, m1, m2, m3, m4, optimize=True)

    last = 1.0 if literal_last_sign else -1.0
    return (
        pull(first, pi, pi, pi, pi)
        - pull(rm, pi, pi, pi, jk)
        - pull(rm, pi, pi, jk, pi)
        - pull(rm, pi, jk, pi, pi)
        + last * pull(rm, jk, pi, pi, pi)
    )


@dataclass
class RmTildeResult:
    formula: np.ndarray
    oracle: np.ndarray
    discrepancy: float


def rm_tilde_tensor(tg: TangentGeometry, p, literal_last_sign: bool = False,
                    strict: bool = True) -> RmTildeResult:
    """Closed-form and direct-chart ``Rm~`` at ``p`` with their relative discrepancy."""
    p = np.asarray(p, dtype=float)
    formula = rm_tilde_formula(point_data(tg, p), literal_last_sign)
    oracle = G.curvature_suite(tg.as_geometry(), p).riemann_0_4
    disc = rel_residual(formula, oracle, ORACLE_FLOOR)
    if strict and disc > ORACLE_TOLERANCE:
        raise OracleMismatch(f"Rm~ disagrees with the direct chart at {p.tolist()}: {disc:.3e}")
    return RmTildeResult(formula, oracle, disc)


def rm_tilde(tg: TangentGeometry, p, X, Y, Z, W) -> tuple[float, float, float]:
    """``(formula, oracle, |formula - oracle|)`` for ``Rm~(X, Y, Z, W)``; hard failure on mismatch."""
    res = rm_tilde_tensor(tg, p, strict=True)
    vecs = [np.asarray(v, dtype=float) for v in (X, Y, Z, W)]
    f = float(np.einsum("abcd,a,b,c,d->", res.formula, *vecs))
    o = float(np.einsum("abcd,a,b,c,d->", res.oracle, *vecs))
    return f, o, abs(f - o)


@dataclass
class RicciTilde:
    ricci: np.ndarray
    scalar: float
    expected: np.ndarray
    residual: float


def ric_scal_tilde(tg: TangentGeometry, p, rm=None) -> RicciTilde:
    """Ricci and scalar curvature of ``g~`` by contracting the closed-form ``Rm~``."""
    p = np.asarray(p, dtype=float)
    data = point_data(tg, p)
    if rm is None:
        rm = rm_tilde_formula(data)
    ginv = np.linalg.inv(tg.g_tilde(p))
    ric = G.ricci_from_rm(rm, ginv)
    scal = float(np.einsum("ij,ij->", ginv, ric))
    expected = 2 * data.pi.T @ data.suite.ricci @ data.pi
    return RicciTilde(ric, scal, expected, max_abs(ric - expected))


def einstein_residual(tg: TangentGeometry, points) -> tuple[float, float]:
    """Best ``lambda`` and the smallest achievable ``max|Ric~ - lambda g~|`` over the points.

    The minimax problem is a small linear program, so the returned residual
    bounds the misfit for every ``lambda``, not just the least-squares one.
    """
    from scipy.optimize import linprog

    points = list(points)
    if len(points) < 8:
        raise ValueError("einstein_residual needs at least 8 points")
    ric, gt = [], []
    for p in points:
        ric.append(ric_scal_tilde(tg, p).ricci.ravel())
        gt.append(tg.g_tilde(np.asarray(p, dtype=float)).ravel())
    a, b = np.concatenate(ric), np.concatenate(gt)
    # minimize t subject to |a - lam b| <= t
    A = np.vstack([np.column_stack([-b, -np.ones_like(b)]), np.column_stack([b, -np.ones_like(b)])])
    rhs = np.concatenate([-a, a])
    sol = linprog([0.0, 1.0], A_ub=A, b_ub=rhs, bounds=[(None, None), (0, None)], method="highs")
    lam = float(sol.x[0])
    return lam, max_abs(a - lam * b)


# ---------------------------------------------------------------------------
# Weyl tensor
# ---------------------------------------------------------------------------
def weyl_direct(rm, ric, scal, g) -> np.ndarray:
    """Weyl tensor of an ``N``-dimensional metric from its curvature data."""
    N = g.shape[0]
    return (
        rm
        - kulkarni_nomizu(ric, g) / (N - 2)
        + scal / (2 * (N - 1) * (N - 2)) * kulkarni_nomizu(g, g)
    )


@dataclass
class WeylTildeResult:
    kulkarni_nomizu: np.ndarray
    t2_form: np.ndarray | None
    direct: np.ndarray
    residuals: dict

    @property
    def max_component(self) -> float:
        return max_abs(self.direct)


def weyl_tilde_tensor(tg: TangentGeometry, p) -> WeylTildeResult:
    """``W~`` three ways: Kulkarni-Nomizu expansion, the surface ``T2`` form, direct chart."""
    p = np.asarray(p, dtype=float)
    data = point_data(tg, p)
    n = tg.base.n
    rm = rm_tilde_formula(data)
    gt = tg.g_tilde(p)
    ric_pi = data.pi.T @ data.suite.ricci @ data.pi
    kn = rm - kulkarni_nomizu(ric_pi, gt) / (2 * n - 1)
    t2_form = None
    if n == 1:
        t2xi = np.einsum("abcvl,v->abcl", data.t2, data.xi)
        first = np.einsum("abcl,lm,mw->abcw", t2xi, data.g, data.j)
        pi = data.pi
        t2_form = np.einsum("abcd,aA,bB,cC,dD->ABCD", first, pi, pi, pi, pi, optimize=True)
    suite = G.curvature_suite(tg.as_geometry(), p)
    direct = weyl_direct(suite.riemann_0_4, suite.ricci, suite.scalar, suite.metric)
    residuals = {"kn_vs_direct": rel_residual(kn, direct, ORACLE_FLOOR)}
    if t2_form is not None:
        residuals["t2_vs_kn"] = max_abs(t2_form - kn)
        residuals["t2_vs_direct"] = rel_residual(t2_form, direct, ORACLE_FLOOR)
    return WeylTildeResult(kn, t2_form, direct, residuals)


def weyl_tilde(tg: TangentGeometry, p, X, Y, Z, W) -> float:
    """``W~(X, Y, Z, W)``; raises if the three computations disagree."""
    res = weyl_tilde_tensor(tg, p)
    worst = max(res.residuals.values())
    if worst > ORACLE_TOLERANCE:
        raise OracleMismatch(f"Weyl computations disagree at {np.asarray(p).tolist()}: {worst:.3e}")
    vecs = [np.asarray(v, dtype=float) for v in (X, Y, Z, W)]
    return float(np.einsum("abcd,a,b,c,d->", res.kulkarni_nomizu, *vecs))


# ---------------------------------------------------------------------------
# holomorphic sectional curvature
# ---------------------------------------------------------------------------
def hol_tilde(tg: TangentGeometry, p, Xbar, rm=None) -> float:
    """``Rm~(X, J~X, X, J~X)`` for a coordinate vector ``Xbar`` at ``p``."""
    p = np.asarray(p, dtype=float)
    if rm is None:
        rm = rm_tilde_formula(point_data(tg, p))
    X = np.asarray(Xbar, dtype=float)
    JX = tg.j_tilde(p) @ X
    return float(np.einsum("abcd,a,b,c,d->", rm, X, JX, X, JX))


def base_hol(geom: Geometry, x, X, suite=None) -> float:
    """``Rm(X, jX, X, jX)`` on the base."""
    suite = suite or G.curvature_suite(geom, x)
    X = np.asarray(X, dtype=float)
    jX = geom.j(x) @ X
    return float(np.einsum("abcd,a,b,c,d->", suite.riemann_0_4, X, jX, X, jX))


def hol_identity_audit(tg: TangentGeometry, p, X, Y, literal: bool = False) -> dict[str, float]:
    """Residuals of the specializations of ``Hol~`` to ``X^h + Y^v``.

    'vertical': ``Hol~(X^v)``; 'diagonal': ``Hol~(X^h + X^v) - h(X)``;
    'difference': ``Hol~(X^h + (jX)^v) - Hol~(X^h + X^v) - 4 eps Hol(X)``;
    'general': ``Hol~(X^h + Y^v) - h(X) + 4 eps g(R(X, Y) X, jX)``.

    Here ``h(X) = g(T2(X, jX, X, V), j jX) = -eps g(T2(X, jX, X, V), X)``,
    which is what the closed form of ``Rm~`` gives with ``J~X^h = (jX)^h`` in
    the last slot.  With ``literal=True`` the last argument is ``jX`` instead;
    that variant vanishes identically on surfaces and only agrees with
    ``Hol~`` where the curvature is constant.
    """
    from .lift import lift_vector

    base = tg.base
    d = base.dim
    p = np.asarray(p, dtype=float)
    x, xi = p[:d], p[d:]
    data = point_data(tg, p)
    rm = rm_tilde_formula(data)
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    j, g, eps = data.j, data.g, data.eps
    jX = j @ X
    last = jX if literal else j @ jX
    t2_term = float(np.einsum("abcvl,a,b,c,v,l->", data.t2, X, jX, X, xi, g @ last))
    r_xyx = np.einsum("ijkl,i,j,k->l", data.suite.riemann_1_3, X, Y, X)
    zero = np.zeros(d)

    def H(h, v):
        return hol_tilde(tg, p, lift_vector(tg, p, h, v), rm)

    hol = base_hol(base, x, X, data.suite)
    return {
        "vertical": abs(H(zero, X)),
        "diagonal": abs(H(X, X) - t2_term),
        "difference": abs(H(X, jX) - H(X, X) - 4 * eps * hol),
        "general": abs(H(X, Y) - (t2_term - 4 * eps * float(r_xyx @ g @ jX))),
    }
