"""Chart-based pseudo- and para-Kähler manifolds and their Levi-Civita data.

Index conventions used throughout the package:

* ``gamma[k, i, j]`` is the Christoffel symbol with upper index ``k``.
* ``r13[i, j, k, l]`` are the components of ``R(d_i, d_j) d_k = r13[i, j, k, l] d_l``
  with ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``.
* ``rm[i, j, k, l] = RM_SIGN * g(R(d_i, d_j) d_k, d_l)`` with ``RM_SIGN = -1``, so that a
  surface of Gaussian curvature ``c`` has ``rm = c (g_ik g_jl - g_il g_jk)``.
* ``ricci[i, j] = g^{kl} rm[i, k, j, l]`` and ``scal = g^{ij} ricci[i, j]``;
  the round sphere has positive scalar curvature.
* Matrices of endomorphisms act on column vectors: ``(jX)^a = j[a, b] X^b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets as J
from .jets import Jet
from .rng import SplitMix64

RM_SIGN = -1.0
DET_FLOOR = 1e-10


class GeometryError(ValueError):
    """Raised for invalid catalog requests or degenerate metrics."""


# ---------------------------------------------------------------------------
# small jet/array helpers
# ---------------------------------------------------------------------------
def as_jet(a, basis) -> Jet:
    return a if isinstance(a, Jet) else Jet.constant(a, basis)


def block_diag(a, b):
    """Block-diagonal matrix of two square (jet or plain) matrices."""
    basis = J._find_basis([a, b])
    na, nb = np.shape(J.value_of(a))[0], np.shape(J.value_of(b))[0]
    if basis is None:
        out = np.zeros((na + nb, na + nb))
        out[:na, :na], out[na:, na:] = a, b
        return out
    a, b = as_jet(a, basis), as_jet(b, basis)
    coeffs = np.zeros((basis.size, na + nb, na + nb))
    coeffs[:, :na, :na] = a.coeffs
    coeffs[:, na:, na:] = b.coeffs
    return Jet(coeffs, basis)


def block_matrix(rows):
    """Assemble a matrix from a nested list of (jet or plain) blocks."""
    flat = [b for row in rows for b in row]
    basis = J._find_basis(flat)
    if basis is None:
        return np.block([[np.asarray(b, dtype=float) for b in row] for row in rows])
    rows = [[as_jet(b, basis) for b in row] for row in rows]
    coeffs = np.concatenate(
        [np.concatenate([b.coeffs for b in row], axis=2) for row in rows], axis=1
    )
    return Jet(coeffs, basis)


def jacobian_matrix(fjet: Jet) -> np.ndarray:
    """``D[a, i] = d_i f^a`` at the base point for a vector jet ``f``."""
    return fjet.gradient().T


def max_abs(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0


def rel_residual(a, b, floor: float = 1e-3) -> float:
    """``max|a - b|`` scaled by ``max(max|b|, floor)``."""
    return max_abs(np.asarray(a) - np.asarray(b)) / max(max_abs(b), floor)


def _is_identity_seed(xjet: Jet) -> bool:
    n = xjet.shape[0]
    if xjet.nvars != n or xjet.order == 0:
        return xjet.nvars == n and xjet.order == 0
    expected = np.zeros_like(xjet.coeffs)
    expected[0] = xjet.coeffs[0]
    expected[1 : 1 + n] = np.eye(n)
    return np.array_equal(xjet.coeffs, expected)


def field_at(compute: Callable[[Jet], Jet], xjet, extra: int) -> Jet | np.ndarray:
    """Evaluate a differential expression of a field along a jet argument.

    ``compute`` maps the identity jet in chart variables (order ``k + extra``)
    to a jet of order ``k``; the result is then composed with ``xjet``.  A plain
    array argument gives plain values.
    """
    if not isinstance(xjet, Jet):
        x = np.asarray(xjet, dtype=float)
        return compute(J.variables(x, extra)).value
    k = xjet.order
    if k + extra > J.MAX_ORDER:
        raise J.JetError(
            f"need base jets of order {k + extra}, beyond the supported maximum {J.MAX_ORDER}"
        )
    if _is_identity_seed(xjet):
        return compute(xjet if extra == 0 else J.variables(xjet.value, k + extra))
    out = compute(J.variables(xjet.value, k + extra))
    return out.compose(xjet)


# ---------------------------------------------------------------------------
# the Geometry type
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Domain:
    """Chart sampler: a box plus an optional acceptance predicate."""

    lower: tuple
    upper: tuple
    accept: Callable[[np.ndarray], bool] | None = None
    max_tries: int = 10_000

    def sample(self, rng: SplitMix64, count: int) -> list[np.ndarray]:
        points = []
        tries = 0
        while len(points) < count:
            tries += 1
            if tries > self.max_tries * max(count, 1):
                raise GeometryError("rejection sampler exhausted its budget")
            p = rng.box(self.lower, self.upper)
            if self.accept is None or self.accept(p):
                points.append(p)
        return points

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        inside = bool(np.all(x >= np.asarray(self.lower)) and np.all(x <= np.asarray(self.upper)))
        return inside and (self.accept is None or self.accept(x))


@dataclass(frozen=True)
class Geometry:
    """A pseudo- or para-Kähler structure on a coordinate chart.

    Attributes
    ----------
    dim : int
        Real dimension ``2n``.
    epsilon : int
        ``+1`` for complex structures (``j^2 = -Id``), ``-1`` for para-complex ones.
    metric : callable
        Point (array or vector jet) to the symmetric matrix ``g_ij``.
    structure : callable
        Point to the matrix of ``j``.
    domain : Domain
    label : str
    curvature_kind : {'flat', 'constant', 'variable'}
        For surfaces, what is known in closed form about the Gaussian curvature.
    curvature_constant : float or None
    """

    dim: int
    epsilon: int
    metric: Callable
    structure: Callable
    domain: Domain
    label: str
    params: dict = field(default_factory=dict)
    curvature_kind: str = "variable"
    curvature_constant: float | None = None

    def __post_init__(self):
        if self.dim % 2:
            raise GeometryError(f"dimension must be even, got {self.dim}")
        if self.epsilon not in (1, -1):
            raise GeometryError(f"epsilon must be +1 or -1, got {self.epsilon}")

    @property
    def n(self) -> int:
        return self.dim // 2

    def g(self, x) -> np.ndarray:
        return np.asarray(J.value_of(self.metric(np.asarray(x, dtype=float))), dtype=float)

    def j(self, x) -> np.ndarray:
        return np.asarray(J.value_of(self.structure(np.asarray(x, dtype=float))), dtype=float)

    def sample(self, rng: SplitMix64, count: int) -> list[np.ndarray]:
        return self.domain.sample(rng, count)

    def with_structure(self, structure: Callable, label: str | None = None) -> "Geometry":
        return Geometry(
            self.dim, self.epsilon, self.metric, structure, self.domain,
            label or self.label, dict(self.params), "variable", None,
        )

    def __repr__(self) -> str:
        return f"Geometry({self.label}, dim={self.dim}, epsilon={self.epsilon:+d})"


# ---------------------------------------------------------------------------
# Levi-Civita data on jets in chart variables
# ---------------------------------------------------------------------------
def _check_metric(g0: np.ndarray) -> None:
    det = np.linalg.det(g0)
    if not np.isfinite(det) or abs(det) < DET_FLOOR:
        raise GeometryError(f"metric is degenerate at this point (|det g| = {abs(det):.3e})")


def levi_civita(gjet: Jet) -> Jet:
    """Christoffel symbols from a metric jet in chart variables (order drops by one)."""
    _check_metric(gjet.coeffs[0])
    dg = gjet.jacobian()  # dg[l, i, j] = d_l g_ij
    ginv = J.inv(gjet.truncate(gjet.order - 1))
    lowered = 0.5 * (dg + dg.transpose(2, 0, 1) - dg.transpose(1, 2, 0))
    # lowered[i, j, l] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    return J.einsum("kl,ijl->kij", ginv, lowered)


def riemann13(gamma: Jet) -> Jet:
    """``r13[i, j, k, l]`` from a Christoffel jet (order drops by one)."""
    dgam = gamma.jacobian()  # dgam[i, l, j, k] = d_i Gamma^l_jk
    g0 = gamma.truncate(gamma.order - 1)
    quad = J.einsum("lim,mjk->ijkl", g0, g0)
    deriv = dgam.transpose(0, 2, 3, 1)  # [i, j, k, l]
    return deriv - deriv.transpose(1, 0, 2, 3) + quad - quad.transpose(1, 0, 2, 3)


def lower_riemann(r13, g):
    return RM_SIGN * J.einsum("ijkm,ml->ijkl", r13, g)


def ricci_from_rm(rm, ginv):
    return J.einsum("kl,ikjl->ij", ginv, rm)


def metric_jet(geom: Geometry, v: Jet) -> Jet:
    return as_jet(geom.metric(v), v.basis)


def structure_jet(geom: Geometry, v: Jet) -> Jet:
    return as_jet(geom.structure(v), v.basis)


def christoffel_field(geom: Geometry, xjet):
    """Christoffel symbols along a jet (or at a plain point)."""
    return field_at(lambda v: levi_civita(metric_jet(geom, v)), xjet, 1)


def riemann_field(geom: Geometry, xjet):
    """``r13`` along a jet (or at a plain point)."""
    return field_at(lambda v: riemann13(levi_civita(metric_jet(geom, v))), xjet, 2)


def christoffel(geom: Geometry, x) -> np.ndarray:
    """Christoffel symbols ``gamma[k, i, j]`` at a chart point."""
    return christoffel_field(geom, np.asarray(x, dtype=float))


@dataclass
class CurvatureSuite:
    """Levi-Civita curvature data at one point (index conventions in the module doc)."""

    point: np.ndarray
    metric: np.ndarray
    metric_inverse: np.ndarray
    christoffel: np.ndarray
    riemann_1_3: np.ndarray
    riemann_0_4: np.ndarray
    ricci: np.ndarray
    scalar: float

    def symmetry_residuals(self) -> dict[str, float]:
        rm = self.riemann_0_4
        bianchi = rm + rm.transpose(1, 2, 0, 3) + rm.transpose(2, 0, 1, 3)
        return {
            "antisym_12": max_abs(rm + rm.transpose(1, 0, 2, 3)),
            "antisym_34": max_abs(rm + rm.transpose(0, 1, 3, 2)),
            "pair_exchange": max_abs(rm - rm.transpose(2, 3, 0, 1)),
            "bianchi": max_abs(bianchi),
            "ricci_symmetric": max_abs(self.ricci - self.ricci.T),
        }

    def scale(self) -> float:
        return max(max_abs(self.riemann_0_4), 1.0)


def curvature_suite(geom: Geometry, x) -> CurvatureSuite:
    """Christoffels, Riemann, Ricci and scalar curvature at ``x``."""
    x = np.asarray(x, dtype=float)
    gj = geom.metric(J.variables(x, 2))
    gj = as_jet(gj, J.get_basis(x.size, 2))
    gamma = levi_civita(gj)
    r13 = riemann13(gamma).value
    g0 = gj.value
    ginv = np.linalg.inv(g0)
    rm = lower_riemann(r13, g0)
    ric = ricci_from_rm(rm, ginv)
    return CurvatureSuite(
        point=x, metric=g0, metric_inverse=ginv, christoffel=gamma.value,
        riemann_1_3=r13, riemann_0_4=rm, ricci=ric, scalar=float(np.einsum("ij,ij->", ginv, ric)),
    )


def scalar_field(geom: Geometry, xjet):
    """Scalar curvature along a jet (or at a point)."""

    def compute(v):
        gj = metric_jet(geom, v)
        r13 = riemann13(levi_civita(gj))
        g = gj.truncate(r13.order)
        ginv = J.inv(g)
        ric = ricci_from_rm(lower_riemann(r13, g), ginv)
        return J.einsum("ij,ij->", ginv, ric)

    return field_at(compute, xjet, 2)


# ---------------------------------------------------------------------------
# covariant derivatives
# ---------------------------------------------------------------------------
def covariant_derivative(value, gradient, gamma, variance: str) -> np.ndarray:
    """Components of ``nabla T`` with the derivative slot first.

    Parameters
    ----------
    value : ndarray
        Components of ``T`` at the point.
    gradient : ndarray, shape (dim, *value.shape)
        Coordinate partials ``d_a T``.
    gamma : ndarray
        Christoffel symbols at the point.
    variance : str
        One letter per slot of ``T``: ``'u'`` for a vector (upper) index,
        ``'d'`` for a covector (lower) index.
    """
    value = np.asarray(value, dtype=float)
    if len(variance) != value.ndim or set(variance) - {"u", "d"}:
        raise GeometryError(
            f"variance {variance!r} must give 'u' or 'd' for each of the {value.ndim} slots"
        )
    out = np.array(gradient, dtype=float, copy=True)
    for slot, kind in enumerate(variance):
        moved = np.moveaxis(value, slot, 0)
        if kind == "u":
            corr = np.einsum("sam,m...->as...", gamma, moved)
        else:
            corr = -np.einsum("mas,m...->as...", gamma, moved)
        out += np.moveaxis(corr, 1, slot + 1)
    return out


@dataclass
class PointTensor:
    """A tensor evaluated at one point.

    Attributes
    ----------
    components : ndarray
    variance : str
        ``'u'`` (vector) or ``'d'`` (covector) per slot.
    point : ndarray
    frame : str
        ``'coordinate'`` or ``'orthonormal'``.
    """

    components: np.ndarray
    variance: str
    point: np.ndarray
    frame: str = "coordinate"

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=float)
        if len(self.variance) != self.components.ndim:
            raise GeometryError(
                f"variance {self.variance!r} does not match a tensor of rank {self.components.ndim}"
            )

    def __call__(self, *vectors):
        """Contract the leading slots with the given vectors."""
        out = self.components
        for v in vectors:
            out = np.tensordot(np.asarray(v, dtype=float), out, axes=([0], [0]))
        return out


def nabla_tensor(geom: Geometry, tensor_field: Callable, x, variance: str) -> PointTensor:
    """Covariant derivative of a tensor field at ``x``.

    ``tensor_field`` maps a point (plain array or vector jet) to component
    arrays; it must be built from jet-aware operations.  The derivative slot
    comes first in the result.
    """
    x = np.asarray(x, dtype=float)
    tj = tensor_field(J.variables(x, 1))
    if not isinstance(tj, Jet):  # constant field
        tj = Jet.constant(tj, J.get_basis(x.size, 1))
    if len(variance) != len(tj.shape):
        raise GeometryError(f"variance {variance!r} does not match the field rank {len(tj.shape)}")
    comps = covariant_derivative(tj.value, tj.gradient(), christoffel(geom, x), variance)
    return PointTensor(comps, "d" + variance, x)


# ---------------------------------------------------------------------------
# Kähler audit
# ---------------------------------------------------------------------------
def kahler_audit(geom: Geometry, x) -> dict[str, float]:
    """Residuals of the pseudo-/para-Kähler axioms at ``x``.

    Returns max-norm residuals of ``j^2 + eps Id`` ('j_squared'),
    ``g(j., j.) - eps g`` ('compatibility'), ``nabla j`` ('nabla_j') and the
    exterior derivative of ``omega = g(j., .)`` ('d_omega').
    """
    x = np.asarray(x, dtype=float)
    basis = J.get_basis(x.size, 1)
    xj = J.variables(x, 1)
    gj = as_jet(geom.metric(xj), basis)
    jj = as_jet(geom.structure(xj), basis)
    g0, j0 = gj.value, jj.value
    eye = np.eye(geom.dim)
    gamma = christoffel(geom, x)
    nabla_j = covariant_derivative(j0, jj.gradient(), gamma, "ud")
    omega = J.einsum("ma,mb->ab", jj, gj)
    dom = omega.gradient()  # dom[a, b, c] = d_a omega_bc
    d_omega = dom + dom.transpose(1, 2, 0) + dom.transpose(2, 0, 1)
    return {
        "j_squared": max_abs(j0 @ j0 + geom.epsilon * eye),
        "compatibility": max_abs(j0.T @ g0 @ j0 - geom.epsilon * g0),
        "nabla_j": max_abs(nabla_j),
        "d_omega": max_abs(d_omega),
    }


def metric_condition(geom: Geometry, x) -> float:
    return float(np.linalg.cond(geom.g(x)))


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------
ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])
PARA_SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])
NULL_J = np.diag([1.0, -1.0])


def _const(mat):
    mat = np.array(mat, dtype=float)
    return lambda x: mat


def _positive(name, value):
    if not value > 0:
        raise GeometryError(f"parameter {name} must be positive, got {value}")
    return float(value)


def _box(half):
    return Domain((-half, -half), (half, half))


def flat_c() -> Geometry:
    return Geometry(2, 1, _const(np.eye(2)), _const(ROT), _box(1.0), "flat_c", {}, "flat", 0.0)


def flat_d() -> Geometry:
    return Geometry(
        2, -1, _const(np.diag([1.0, -1.0])), _const(PARA_SWAP), _box(1.0), "flat_d", {}, "flat", 0.0
    )


def sphere(r: float = 1.0) -> Geometry:
    """Round sphere of radius ``r`` in a stereographic chart."""
    r = _positive("r", r)

    def metric(q):
        s = q[0] * q[0] + q[1] * q[1]
        return 4 * r**4 / ((r * r + s) * (r * r + s)) * np.eye(2)

    return Geometry(
        2, 1, metric, _const(ROT), _box(0.9 * r), f"sphere(r={r:g})", {"r": r},
        "constant", 1.0 / r**2,
    )


def hyperbolic(r: float = 1.0) -> Geometry:
    """Poincaré disc of curvature ``-1/r^2``, sampled on ``|q| < 0.9 r``."""
    r = _positive("r", r)

    def metric(q):
        s = q[0] * q[0] + q[1] * q[1]
        return 4 * r**4 / ((r * r - s) * (r * r - s)) * np.eye(2)

    domain = Domain((-0.9 * r, -0.9 * r), (0.9 * r, 0.9 * r), lambda p: float(p @ p) < (0.9 * r) ** 2)
    return Geometry(
        2, 1, metric, _const(ROT), domain, f"hyperbolic(r={r:g})", {"r": r},
        "constant", -1.0 / r**2,
    )


def de_sitter(r: float = 1.0) -> Geometry:
    """De Sitter surface in null coordinates, ``g = 2F du dv`` with ``F = 2/(1 + uv/r^2)^2``.

    The para-complex structure ``j = diag(1, -1)`` preserves the two null line
    fields, which the Levi-Civita connection of any Lorentzian surface also
    preserves, so ``j`` is parallel for every conformal factor.
    """
    r = _positive("r", r)

    def metric(x):
        w = 1 + x[0] * x[1] / (r * r)
        return 2 / (w * w) * PARA_SWAP

    return Geometry(
        2, -1, metric, _const(NULL_J), _box(0.9 * r), f"de_sitter(r={r:g})", {"r": r},
        "constant", 1.0 / r**2,
    )


def bump(a: float = 0.5, sigma: float = 1.0) -> Geometry:
    """Conformally flat Kähler surface ``exp(2a exp(-|q|^2/sigma^2)) |dq|^2``."""
    sigma = _positive("sigma", sigma)
    a = float(a)

    def metric(q):
        s = q[0] * q[0] + q[1] * q[1]
        return J.exp(2 * a * J.exp(-s / (sigma * sigma))) * np.eye(2)

    return Geometry(
        2, 1, metric, _const(ROT), _box(1.5 * sigma), f"bump(a={a:g},sigma={sigma:g})",
        {"a": a, "sigma": sigma}, "variable", None,
    )


def para_bump(a: float = 0.5, sigma: float = 1.0) -> Geometry:
    """Para-Kähler surface ``2F du dv`` with ``F = exp(2a exp(-(u^2+v^2)/sigma^2))``."""
    sigma = _positive("sigma", sigma)
    a = float(a)

    def metric(x):
        s = x[0] * x[0] + x[1] * x[1]
        return J.exp(2 * a * J.exp(-s / (sigma * sigma))) * PARA_SWAP

    return Geometry(
        2, -1, metric, _const(NULL_J), _box(1.5 * sigma), f"para_bump(a={a:g},sigma={sigma:g})",
        {"a": a, "sigma": sigma}, "variable", None,
    )


def product(a: Geometry, b: Geometry, flip_b: bool = False) -> Geometry:
    """Product of two Kähler surfaces, with ``g_b`` negated when ``flip_b``."""
    if a.epsilon != b.epsilon:
        raise GeometryError(f"cannot multiply geometries with epsilon {a.epsilon} and {b.epsilon}")
    if a.dim != 2 or b.dim != 2:
        raise GeometryError("product expects two surfaces")
    s = -1.0 if flip_b else 1.0

    def metric(x):
        return block_diag(a.metric(x[0:2]), s * b.metric(x[2:4]))

    def structure(x):
        return block_diag(a.structure(x[0:2]), b.structure(x[2:4]))

    accept_a, accept_b = a.domain.accept, b.domain.accept

    def accept(p):
        return (accept_a is None or accept_a(p[:2])) and (accept_b is None or accept_b(p[2:]))

    domain = Domain(
        tuple(a.domain.lower) + tuple(b.domain.lower),
        tuple(a.domain.upper) + tuple(b.domain.upper),
        None if accept_a is None and accept_b is None else accept,
    )
    kind = "flat" if a.curvature_kind == b.curvature_kind == "flat" else "variable"
    label = f"product({a.label},{b.label},flip={bool(flip_b)})"
    return Geometry(4, a.epsilon, metric, structure, domain, label,
                    {"a": a.label, "b": b.label, "flip_b": bool(flip_b)}, kind,
                    0.0 if kind == "flat" else None)


BASE_NAMES = {
    "flat_c": (flat_c, {}),
    "flat_d": (flat_d, {}),
    "sphere": (sphere, {"r": 1.0}),
    "hyperbolic": (hyperbolic, {"r": 1.0}),
    "de_sitter": (de_sitter, {"r": 1.0}),
    "bump": (bump, {"a": 0.5, "sigma": 1.0}),
    "para_bump": (para_bump, {"a": 0.5, "sigma": 1.0}),
}

PRODUCT_NAMES = {
    "flat_product": lambda: product(flat_c(), flat_c(), True),
    "sphere_product": lambda: product(sphere(1.0), sphere(2.0), True),
    "para_product": lambda: product(de_sitter(1.0), para_bump(), False),
}


def catalog_entries() -> dict[str, dict]:
    """Names and default parameters of all catalog geometries."""
    out = {name: dict(defaults) for name, (_, defaults) in BASE_NAMES.items()}
    out.update({name: {} for name in PRODUCT_NAMES})
    return out


def catalog(name: str, **params) -> Geometry:
    """Build a named geometry.

    Parameters
    ----------
    name : str
        One of ``flat_c, flat_d, sphere, hyperbolic, de_sitter, bump,
        para_bump`` or the products ``flat_product`` (flat_c x -flat_c),
        ``sphere_product`` (sphere(1) x -sphere(2)) and ``para_product``
        (de_sitter(1) x para_bump).
    **params
        Overrides of the default parameters (``r``, ``a``, ``sigma``).
    """
    if name in PRODUCT_NAMES:
        if params:
            raise GeometryError(f"{name} takes no parameters")
        return PRODUCT_NAMES[name]()
    if name not in BASE_NAMES:
        known = ", ".join(sorted(catalog_entries()))
        raise GeometryError(f"unknown geometry {name!r}; known: {known}")
    ctor, defaults = BASE_NAMES[name]
    unknown = set(params) - set(defaults)
    if unknown:
        raise GeometryError(f"{name} does not take parameter(s) {sorted(unknown)}")
    merged = {**defaults, **{k: float(v) for k, v in params.items()}}
    return ctor(**merged)


def gaussian_curvature(suite: CurvatureSuite) -> float:
    """Sectional curvature of a surface, ``Scal / 2``."""
    if suite.metric.shape != (2, 2):
        raise GeometryError("Gaussian curvature is defined for surfaces only")
    return 0.5 * suite.scalar


def unit_pair(geom: Geometry, x) -> tuple[np.ndarray, np.ndarray]:
    """A non-null unit vector ``e`` (|g(e,e)| = 1) and ``je`` at a surface point."""
    g = geom.g(x)
    e = np.array([1.0, 1.0]) if abs(g[0, 0]) < 1e-12 else np.array([1.0, 0.0])
    e = e / math.sqrt(abs(e @ g @ e))
    return e, geom.j(x) @ e
