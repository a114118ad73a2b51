"""The canonical structure (J~, g~, Omega) on the tangent bundle of a chart.

Points of the lifted chart are ``P = (x, xi)`` with ``xi`` the fibre
coordinate, and tangent vectors are ``(X, Xi)``.  The Levi-Civita splitting
is ``Pi(X, Xi) = X`` and ``K(X, Xi) = Xi + Gamma(X, xi)``, i.e. the matrices
``Pi = [I, 0]`` and ``K = [Gamma xi, I]`` with ``(Gamma xi)[k, i] = Gamma^k_ij xi^j``.
From these,

* ``Omega(U, V) = g(KU, PiV) - g(PiU, KV)``,
* ``g~(U, V) = g(KU, j PiV) - g(PiU, j KV)``,
* ``J~ = [[j, 0], [j Gamma xi - Gamma xi j, j]]`` (the unique matrix with
  ``Pi J~ = j Pi`` and ``K J~ = j K``).

Bilinear forms are stored as matrices ``M`` with ``B(u, v) = u^T M v``.
Exterior products follow the convention ``(a ^ b)(u, v) = a(v) b(u) - a(u) b(v)``
(``WEDGE_SIGN = -1`` relative to the determinant convention); with it the
form above, the pull-back of ``-d(p dq)`` and the canonical ``sum dq ^ dp``
coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import geometry as G
from . import jets as J
from .geometry import Domain, Geometry, block_matrix, jacobian_matrix, max_abs
from .jets import Jet

WEDGE_SIGN = -1.0
FIBRE_HALF_WIDTH = 2.0
LIFT_AUDIT_THRESHOLD = 1e-7


class LiftError(ValueError):
    """Raised when a base geometry cannot be lifted."""


def wedge(a, b) -> np.ndarray:
    """Matrix of the 2-form ``a ^ b`` for covectors ``a``, ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return WEDGE_SIGN * (np.outer(a, b) - np.outer(b, a))


# ---------------------------------------------------------------------------
# coefficient fields
# ---------------------------------------------------------------------------
def _split_point(base: Geometry, P):
    d = base.dim
    return P[:d], P[d:]


def _gamma_xi(base: Geometry, x, xi):
    gam = G.christoffel_field(base, x)
    return J.einsum("kij,j->ki", gam, xi)


def _base_fields(base: Geometry, P):
    x, xi = _split_point(base, P)
    g, j = base.metric(x), base.structure(x)
    return g, j, _gamma_xi(base, x, xi)


def omega_matrix(base: Geometry, P):
    """Omega at ``P`` (array or jet point)."""
    g, _, gx = _base_fields(base, P)
    upper_left = J.einsum("ka,kb->ab", gx, g) - J.einsum("ak,kb->ab", g, gx)
    zero = np.zeros((base.dim, base.dim))
    return block_matrix([[upper_left, -1.0 * g], [g, zero]])


def g_tilde_matrix(base: Geometry, P):
    """The lifted metric at ``P``."""
    g, j, gx = _base_fields(base, P)
    gj = J.einsum("ak,kb->ab", g, j)
    upper_left = J.einsum("ka,kb->ab", gx, gj) - J.einsum("ak,kb->ab", gj, gx)
    zero = np.zeros((base.dim, base.dim))
    return block_matrix([[upper_left, -1.0 * gj], [gj, zero]])


def j_tilde_matrix(base: Geometry, P):
    """The lifted (para-)complex structure at ``P``."""
    _, j, gx = _base_fields(base, P)
    lower_left = J.einsum("ak,kb->ab", j, gx) - J.einsum("ak,kb->ab", gx, j)
    zero = np.zeros((base.dim, base.dim))
    return block_matrix([[j, zero], [lower_left, j]])


@dataclass(frozen=True)
class TangentGeometry:
    """The lifted structure on the ``4n``-dimensional chart of ``TM``."""

    base: Geometry
    fibre_half_width: float = FIBRE_HALF_WIDTH

    @property
    def dim(self) -> int:
        return 2 * self.base.dim

    @property
    def epsilon(self) -> int:
        return self.base.epsilon

    def g_tilde(self, P):
        return g_tilde_matrix(self.base, P)

    def j_tilde(self, P):
        return j_tilde_matrix(self.base, P)

    def omega(self, P):
        return omega_matrix(self.base, P)

    @property
    def domain(self) -> Domain:
        bd = self.base.domain
        w = self.fibre_half_width
        accept = None
        if bd.accept is not None:
            d = self.base.dim
            accept = lambda P: bd.accept(P[:d])  # noqa: E731
        return Domain(
            tuple(bd.lower) + (-w,) * self.base.dim, tuple(bd.upper) + (w,) * self.base.dim, accept
        )

    def sample(self, rng, count: int) -> list[np.ndarray]:
        return self.domain.sample(rng, count)

    def as_geometry(self) -> Geometry:
        """The lifted chart as an ordinary geometry (the direct-chart oracle)."""
        return Geometry(
            self.dim, self.epsilon, self.g_tilde, self.j_tilde, self.domain,
            f"T[{self.base.label}]", {"base": self.base.label}, "variable", None,
        )

    def gamma_xi(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        x, xi = _split_point(self.base, p)
        return _gamma_xi(self.base, x, xi)


def lift_geometry(geom: Geometry, audit_points=None, seed: int = 0) -> TangentGeometry:
    """Lift a pseudo- or para-Kähler base to its tangent bundle.

    The base is audited first (``kahler_audit`` below ``1e-7`` at a few
    sampled points plus any given ``audit_points``); the simplified splitting
    formulas are only valid when ``j`` is parallel, so failures are refused.
    """
    from .rng import SplitMix64

    points = list(geom.sample(SplitMix64(seed), 4))
    if audit_points is not None:
        points += [np.asarray(p, dtype=float) for p in audit_points]
    for x in points:
        res = G.kahler_audit(geom, x)
        worst = max(res, key=res.get)
        if res[worst] > LIFT_AUDIT_THRESHOLD:
            raise LiftError(
                f"{geom.label} is not Kähler at {np.round(x, 6).tolist()}: "
                f"{worst} residual {res[worst]:.3e}"
            )
    return TangentGeometry(geom)


# ---------------------------------------------------------------------------
# splitting and lifts
# ---------------------------------------------------------------------------
@dataclass
class SplitVector:
    """A tangent vector of ``TM`` in the form ``(Pi v, K v)``."""

    pi: np.ndarray
    k: np.ndarray

    def __iter__(self):
        yield self.pi
        yield self.k


def split(tg: TangentGeometry, p, v) -> SplitVector:
    """``(Pi v, K v)`` for a coordinate vector ``v = (X, Xi)`` at ``p``."""
    v = np.asarray(v, dtype=float)
    d = tg.base.dim
    X, Xi = v[:d], v[d:]
    return SplitVector(X.copy(), Xi + tg.gamma_xi(p) @ X)


def reassemble(tg: TangentGeometry, p, s: SplitVector) -> np.ndarray:
    """Inverse of :func:`split`."""
    pi, k = (np.asarray(a, dtype=float) for a in s)
    return np.concatenate([pi, k - tg.gamma_xi(p) @ pi])


def horizontal_lift(tg: TangentGeometry, p, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.concatenate([X, -tg.gamma_xi(p) @ X])


def vertical_lift(tg: TangentGeometry, p, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.concatenate([np.zeros_like(X), X])


def lift_vector(tg: TangentGeometry, p, horizontal, vertical) -> np.ndarray:
    """``horizontal^h + vertical^v`` at ``p``."""
    return horizontal_lift(tg, p, horizontal) + vertical_lift(tg, p, vertical)


def _lifted_field_jets(tg: TangentGeometry, X: Callable, P: Jet):
    """Horizontal and vertical lifts of a base field as jets on the lifted chart."""
    base = tg.base
    x, xi = _split_point(base, P)
    Xv = G.as_jet(X(x), P.basis)
    gx = _gamma_xi(base, x, xi)
    horiz = J.stack([*Xv, *(-1.0 * J.einsum("ki,i->k", gx, Xv))])
    zero = Jet.constant(np.zeros(base.dim), P.basis)
    vert = J.stack([*zero, *Xv])
    return horiz, vert


def _bracket(A: Jet, B: Jet) -> np.ndarray:
    """Coordinate Lie bracket ``[A, B] = DB A - DA B`` at the base point."""
    return jacobian_matrix(B) @ A.value - jacobian_matrix(A) @ B.value


def bracket_audit(tg: TangentGeometry, X: Callable, Y: Callable, p) -> dict[str, float]:
    """Residuals of the three bracket identities for horizontal/vertical lifts.

    ``X`` and ``Y`` are base vector fields given as jet-aware callables.
    Returns residuals 'vv' (``[X^v, Y^v] = 0``), 'hv'
    (``[X^h, Y^v] = (nabla_X Y)^v``) and 'hh'
    (``split [X^h, Y^h] = ([X, Y], -R(X, Y) xi)``).
    """
    base = tg.base
    d = base.dim
    p = np.asarray(p, dtype=float)
    P = J.variables(p, 1)
    Xh, Xv = _lifted_field_jets(tg, X, P)
    Yh, Yv = _lifted_field_jets(tg, Y, P)
    x0, xi0 = p[:d], p[d:]

    xb = J.variables(x0, 1)
    Xb, Yb = G.as_jet(X(xb), xb.basis), G.as_jet(Y(xb), xb.basis)
    gamma = G.christoffel(base, x0)
    nabla_xy = jacobian_matrix(Yb) @ Xb.value + np.einsum("kij,i,j->k", gamma, Xb.value, Yb.value)
    base_bracket = _bracket(Xb, Yb)
    r13 = G.riemann_field(base, x0)
    r_xy_xi = np.einsum("ijkl,i,j,k->l", r13, Xb.value, Yb.value, xi0)

    vv = _bracket(Xv, Yv)
    hv = _bracket(Xh, Yv) - vertical_lift(tg, p, nabla_xy)
    s = split(tg, p, _bracket(Xh, Yh))
    hh = np.concatenate([s.pi - base_bracket, s.k + r_xy_xi])
    return {"vv": max_abs(vv), "hv": max_abs(hv), "hh": max_abs(hh)}


# ---------------------------------------------------------------------------
# the general (possibly non-integrable) lift
# ---------------------------------------------------------------------------
def structure_gradient(geom: Geometry, x) -> np.ndarray:
    """``dj[m, a, b] = d_m j[a, b]`` at ``x``."""
    x = np.asarray(x, dtype=float)
    jj = G.structure_jet(geom, J.variables(x, 1))
    return jj.gradient()


def almost_j_tilde_matrix(geom: Geometry, p) -> np.ndarray:
    """``[[j, 0], [D_xi j, j]]`` at ``p = (x, xi)`` (no integrability assumed)."""
    p = np.asarray(p, dtype=float)
    d = geom.dim
    x, xi = p[:d], p[d:]
    j = geom.j(x)
    dxi_j = np.einsum("mab,m->ab", structure_gradient(geom, x), xi)
    return np.block([[j, np.zeros((d, d))], [dxi_j, j]])


def almost_j_tilde(geom: Geometry, p, v) -> np.ndarray:
    """``(jX, j Xi + (D_xi j) X)`` for ``v = (X, Xi)`` at ``p = (x, xi)``."""
    return almost_j_tilde_matrix(geom, p) @ np.asarray(v, dtype=float)


def nijenhuis(geom: Geometry, x) -> np.ndarray:
    """Nijenhuis tensor ``N[i, j, k]`` of the structure, ``N(d_i, d_j) = N[i, j, :]``."""
    x = np.asarray(x, dtype=float)
    j = geom.j(x)
    dj = structure_gradient(geom, x)  # dj[m, k, j] = d_m j^k_j
    t1 = np.einsum("mi,mkj->ijk", j, dj) - np.einsum("mj,mki->ijk", j, dj)
    t2 = np.einsum("km,imj->ijk", j, dj) - np.einsum("km,jmi->ijk", j, dj)
    return t1 - t2


@dataclass(frozen=True)
class PolynomialMap:
    """``phi(x) = x + A x + B(x, x) + C(x, x, x)``, a perturbation of the identity."""

    linear: np.ndarray | None = None
    quadratic: np.ndarray | None = None
    cubic: np.ndarray | None = None

    def __call__(self, x):
        out = x
        if self.linear is not None:
            out = out + J.einsum("ab,b->a", self.linear, x)
        if self.quadratic is not None:
            out = out + J.einsum("abc,b,c->a", self.quadratic, x, x)
        if self.cubic is not None:
            out = out + J.einsum("abcd,b,c,d->a", self.cubic, x, x, x)
        return out

    def jacobian(self, x):
        """``dphi`` along a jet (order drops by one) or at a point."""
        return G.field_at(lambda v: self(v).jacobian().T, x, 1)

    def inverse_jet(self, y0, order: int, x0=None, iterations: int = 6) -> Jet:
        """Jet of ``phi^{-1}`` at ``y0`` by Newton iteration on jets."""
        y = J.variables(np.asarray(y0, dtype=float), order)
        if x0 is None:
            x0 = np.asarray(y0, dtype=float)
            for _ in range(50):  # plain Newton for the base point
                step = np.linalg.solve(self.jacobian(x0), np.asarray(self(x0)) - y0)
                x0 = x0 - step
                if np.max(np.abs(step)) < 1e-15:
                    break
        det = np.linalg.det(self.jacobian(np.asarray(x0)))
        if abs(det) < 1e-8:
            raise LiftError(f"diffeomorphism Jacobian is near-singular (det={det:.3e})")
        psi = Jet.constant(np.asarray(x0, dtype=float), y.basis)
        for _ in range(iterations):
            jac = self.jacobian(psi)  # jet of order order-1; promote
            jac_full = _promote(jac, y.basis)
            psi = psi - J.einsum("ab,b->a", J.inv(jac_full), self(psi) - y)
        return psi

    @classmethod
    def quadratic_example(cls, scale: float = 0.05, dim: int = 2) -> "PolynomialMap":
        """``x + scale * (x_1^2, x_1 x_2, 0, ...)``."""
        B = np.zeros((dim, dim, dim))
        B[0, 0, 0] = scale
        B[1, 0, 1] = scale
        return cls(quadratic=B)


def _promote(jet, basis) -> Jet:
    """Zero-pad a lower-order jet to ``basis`` (only used inside Newton steps)."""
    if not isinstance(jet, Jet):
        return Jet.constant(jet, basis)
    coeffs = np.zeros((basis.size,) + jet.shape)
    coeffs[: jet.basis.size] = jet.coeffs
    return Jet(coeffs, basis)


def pushforward_structure(geom: Geometry, phi: PolynomialMap, y0) -> Callable:
    """The structure field ``j' = dphi j dphi^{-1}`` near ``y0``, as a jet-aware callable.

    The returned callable evaluates on plain points or on jets whose variables
    are the ``y`` coordinates seeded at ``y0`` (order <= 2).
    """

    def structure(y):
        if not isinstance(y, Jet):
            psi = phi.inverse_jet(y, 1).value
            dphi = phi.jacobian(psi)
            return dphi @ geom.j(psi) @ np.linalg.inv(dphi)
        psi = phi.inverse_jet(y.value, y.order + 1)
        dphi = phi.jacobian(psi)
        j = G.structure_jet(geom, psi.truncate(dphi.order))
        jp = J.einsum("ab,bc,cd->ad", dphi, j, J.inv(dphi))
        return jp.compose(y) if not G._is_identity_seed(y) else jp

    return structure


def chart_invariance_audit(geom: Geometry, phi: PolynomialMap, p, v=None) -> float:
    """Residual of ``dPhi J~ = J~' dPhi`` for ``Phi(x, xi) = (phi(x), dphi(x) xi)``.

    ``J~`` is the general lift of the structure in the original chart and
    ``J~'`` the general lift of the pushed-forward structure in the new chart.
    With ``v`` the residual is evaluated on that vector, otherwise on the
    whole matrix.
    """
    p = np.asarray(p, dtype=float)
    d = geom.dim
    x, xi = p[:d], p[d:]
    dphi = phi.jacobian(x)
    if abs(np.linalg.det(dphi)) < 1e-8:
        raise LiftError("diffeomorphism Jacobian is near-singular at the point")
    dphi_j = phi.jacobian(J.variables(x, 2)).truncate(1)
    hess = dphi_j.gradient()  # hess[m, a, i] = d_m d_i phi^a
    dPhi = np.block([[dphi, np.zeros((d, d))], [np.einsum("mai,i->am", hess, xi), dphi]])

    y0 = np.asarray(phi(x), dtype=float)
    eta0 = dphi @ xi
    pushed = geom.with_structure(pushforward_structure(geom, phi, y0), f"{geom.label}'")
    lhs = dPhi @ almost_j_tilde_matrix(geom, p)
    rhs = almost_j_tilde_matrix(pushed, np.concatenate([y0, eta0])) @ dPhi
    if v is not None:
        v = np.asarray(v, dtype=float)
        return max_abs(lhs @ v - rhs @ v)
    return max_abs(lhs - rhs)


# ---------------------------------------------------------------------------
# test structures for the general lift
# ---------------------------------------------------------------------------
def rotation_field_structure(theta: Callable | None = None, stretch=(1.0, 2.0)) -> Geometry:
    """2D almost-complex structure ``R(theta) S J0 S^{-1} R(theta)^{-1}`` with a flat metric."""
    if theta is None:
        theta = lambda x: 0.3 * x[0] + 0.2 * x[1] * x[1]  # noqa: E731
    S = np.diag(stretch)
    core = S @ G.ROT @ np.linalg.inv(S)

    def structure(x):
        t = theta(x)
        c, s = J.cos(t), J.sin(t)
        R = J.array([[c, -1.0 * s], [s, c]])
        Rinv = J.array([[c, s], [-1.0 * s, c]])
        return J.einsum("ab,bc,cd->ad", R, core, Rinv)

    return Geometry(
        2, 1, lambda x: np.eye(2), structure, Domain((-1.0, -1.0), (1.0, 1.0)),
        "rotation_field", {}, "flat", 0.0,
    )


def nonintegrable_structure(strength: float = 0.4) -> Geometry:
    """A 4D almost-complex structure ``P(x) J0 P(x)^{-1}`` with nonzero Nijenhuis tensor."""
    J0 = np.kron(np.eye(2), G.ROT)

    def structure(x):
        one = Jet.constant(1.0, x.basis) if isinstance(x, Jet) else 1.0
        zero = 0.0 * one
        P = J.array([
            [one, zero, strength * x[2], zero],
            [zero, one, zero, zero],
            [zero, strength * x[0] * x[3], one, zero],
            [zero, zero, zero, one + strength * x[1]],
        ])
        return J.einsum("ab,bc,cd->ad", P, J0, J.inv(P))

    return Geometry(
        4, 1, lambda x: np.eye(4), structure, Domain((-0.5,) * 4, (0.5,) * 4),
        "nonintegrable_4d", {"strength": strength}, "flat", 0.0,
    )


# ---------------------------------------------------------------------------
# audits of the symplectic/metric identities
# ---------------------------------------------------------------------------
def metric_identity_residual(tg: TangentGeometry, p) -> float:
    """``g~(U, V) - Omega(U, J~ V)`` in max-norm."""
    p = np.asarray(p, dtype=float)
    return max_abs(tg.g_tilde(p) - tg.omega(p) @ tg.j_tilde(p))


def compatibility_residual(omega, j_tilde, epsilon) -> float:
    """``max|J~^T Omega J~ - eps Omega|``."""
    omega = np.asarray(omega)
    return max_abs(j_tilde.T @ omega @ j_tilde - epsilon * omega)


def compatibility_audit(tg: TangentGeometry, p) -> dict[str, float]:
    """Compatibility of Omega with J~ and closedness of Omega at ``p``."""
    p = np.asarray(p, dtype=float)
    om = tg.omega(J.variables(p, 1))
    dom = om.gradient()
    d_omega = dom + dom.transpose(1, 2, 0) + dom.transpose(2, 0, 1)
    jt = tg.j_tilde(p)
    gt = tg.g_tilde(p)
    return {
        "omega_compat": compatibility_residual(om.value, jt, tg.epsilon),
        "d_omega": max_abs(d_omega),
        "g_compat": max_abs(jt.T @ gt @ jt - tg.epsilon * gt),
    }


def signature(matrix, tol: float = 1e-12) -> tuple[int, int]:
    """(positive, negative) eigenvalue counts of a symmetric matrix."""
    ev = np.linalg.eigvalsh(0.5 * (matrix + np.transpose(matrix)))
    scale = max(np.max(np.abs(ev)), 1.0)
    if np.min(np.abs(ev)) < tol * scale:
        raise LiftError("matrix is degenerate; signature undefined")
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


def canonical_form(dim: int, signs=None) -> np.ndarray:
    """``sum_i s_i dq_i ^ dp_i`` in coordinates ``(q_1..q_d, p_1..p_d)``."""
    signs = np.ones(dim) if signs is None else np.asarray(signs, dtype=float)
    eye = np.eye(2 * dim)
    return sum(s * wedge(eye[i], eye[dim + i]) for i, s in enumerate(signs))


def liouville_pullback_audit(tg: TangentGeometry, p) -> float:
    """Pull back ``sum dq ^ dp`` through ``(x, xi) -> (x, g(x) xi)`` and compare with Omega."""
    base = tg.base
    d = base.dim
    p = np.asarray(p, dtype=float)
    P = J.variables(p, 1)
    x, xi = P[:d], P[d:]
    g = G.as_jet(base.metric(x), P.basis)
    iota = J.stack([*x, *J.einsum("ab,b->a", g, xi)])
    D = jacobian_matrix(iota)
    pulled = D.T @ canonical_form(d) @ D
    return max_abs(pulled - tg.omega(p))


@dataclass(frozen=True)
class Identification:
    """Linear coordinate change from ``(q1, q2, p1, p2)`` and the target 2-form."""

    matrix: np.ndarray
    target_form: np.ndarray
    names: tuple = field(default=())


def identification(which: str, scale: float = math.sqrt(2) / 2) -> Identification:
    """The flat-plane coordinate changes to standard (para-)complex 2-space.

    ``which='complex'``: ``z1 = s((p1 + i p2) + i(q1 + i q2))``,
    ``z2 = s((p1 + i p2) - i(q1 + i q2))`` and the form
    ``-dx1^dy1 + dx2^dy2``.  ``which='para'``:
    ``w1 = s((p1 + t p2) - t(q1 + t q2))``, ``w2 = s(t(p1 + t p2) + (q1 + t q2))``
    with ``t^2 = 1`` and the form ``du1^dv1 + du2^dv2``.
    """
    s = scale
    e = np.eye(4)
    if which == "complex":
        rows = {  # columns: q1, q2, p1, p2
            "x1": [0, -s, s, 0], "y1": [s, 0, 0, s],
            "x2": [0, s, s, 0], "y2": [-s, 0, 0, s],
        }
        target = -wedge(e[0], e[1]) + wedge(e[2], e[3])
    elif which == "para":
        rows = {
            "u1": [0, -s, s, 0], "v1": [-s, 0, 0, s],
            "u2": [s, 0, 0, s], "v2": [0, s, s, 0],
        }
        target = wedge(e[0], e[1]) + wedge(e[2], e[3])
    else:
        raise LiftError(f"unknown identification {which!r}; expected 'complex' or 'para'")
    return Identification(np.array(list(rows.values()), dtype=float), target, tuple(rows))


def symplectic_identification_audit(which: str, scale: float = math.sqrt(2) / 2) -> float:
    """Max-norm difference between the pulled-back standard form and the lifted Omega."""
    ident = identification(which, scale)
    base = G.flat_c() if which == "complex" else G.flat_d()
    tg = TangentGeometry(base)
    pulled = ident.matrix.T @ ident.target_form @ ident.matrix
    return max_abs(pulled - tg.omega(np.zeros(4)))
