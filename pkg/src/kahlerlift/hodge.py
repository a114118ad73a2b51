"""Hodge star, curvature operator and Weyl blocks of 4D neutral (para-)Kähler metrics.

Frames are ``(e1, e1', e2, e2')`` with ``e1' = j e1``, ``e2' = j e2``, stored
as columns in that order (indices 0, 1, 2, 3).  Bivectors use the basis

    B = (e1^e1', e1^e2, e1^e2', e1'^e2, e1'^e2', e2^e2')

with the induced metric ``g(ea^eb) = g(ea) g(eb)``.  The Hodge star is fixed
by ``alpha ^ *beta = g(alpha, beta) e1^e1'^e2^e2'``, so the frame itself
defines the orientation.  Every ``j``-adapted frame induces the same
orientation, hence the star does not depend on the frame chosen.

Block matrices are reported at the normalization of the classical tables:
``DISPLAY_SCALE * W(E_a, E_b)`` with ``DISPLAY_SCALE = 2`` (the tables list
e.g. ``W_11'11' + W_22'22' + 2 W_11'22'`` for the ``E1`` entry, which is twice
the bilinear form on the unit bivector ``E1``).  The raw bilinear form is
kept alongside.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import geometry as G
from .curvature import weyl_direct
from .geometry import Geometry, max_abs

DISPLAY_SCALE = 2.0
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PAIR_INDEX = {p: k for k, p in enumerate(PAIRS)}
NAMES = ("1", "1'", "2", "2'")

PSEUDO_W_MINUS = np.diag([1 / 3, 1 / 6, 1 / 6])
PARA_W_MINUS = np.diag([-1 / 3, -1 / 6, 1 / 6])


class HodgeError(RuntimeError):
    """Raised when a frame or eigenbasis cannot be built consistently."""


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            k = perm[i]
            perm[i], perm[k] = perm[k], perm[i]
            sign = -sign
    return sign


@dataclass
class AdaptedFrame:
    """A ``j``-adapted pseudo-orthonormal frame at a point of a 4D geometry.

    Attributes
    ----------
    vectors : ndarray, shape (4, 4)
        Columns ``e1, e1', e2, e2'``.
    case : {'pseudo', 'para'}
    signs : ndarray
        ``g(e_a, e_a)`` for the four vectors.
    chart_orientation : int
        Sign of ``det[e1, e1', e2, e2']`` in the chart (informational).
    """

    vectors: np.ndarray
    case: str
    signs: np.ndarray
    point: np.ndarray
    chart_orientation: int

    def residuals(self, geom: Geometry) -> dict[str, float]:
        g, j = geom.g(self.point), geom.j(self.point)
        E = self.vectors
        gram = E.T @ g @ E
        return {
            "j_adapted": max(max_abs(E[:, 1] - j @ E[:, 0]), max_abs(E[:, 3] - j @ E[:, 2])),
            "orthonormal": max_abs(gram - np.diag(self.signs)),
            "signs": max_abs(self.signs - expected_signs(self.case)),
        }


def expected_signs(case: str) -> np.ndarray:
    if case == "pseudo":
        return np.array([-1.0, -1.0, 1.0, 1.0])
    if case == "para":
        return np.array([1.0, -1.0, 1.0, -1.0])
    raise HodgeError(f"unknown case {case!r}")


def _candidates(g: np.ndarray):
    """Coordinate directions, their pairwise sums and differences, and the
    eigenvectors of ``g`` (which guarantee a vector of each available sign)."""
    dim = g.shape[0]
    eye = np.eye(dim)
    cands = [eye[i] for i in range(dim)]
    for i, k in itertools.combinations(range(dim), 2):
        cands.append(eye[i] + eye[k])
        cands.append(eye[i] - eye[k])
    _, vecs = np.linalg.eigh(g)
    for v in vecs.T:
        cands.append(v * np.sign(v[np.argmax(np.abs(v))]))
    return cands


def _pick(cands, g, sign, project):
    best, best_val = None, 0.0
    for v in cands:
        w = project(v)
        q = float(w @ g @ w)
        if q * sign > best_val:
            best, best_val = w, q * sign
    if best is None or best_val < 1e-8:
        raise HodgeError("no candidate vector of the required sign; resample the point")
    return best / math.sqrt(best_val)


def adapted_frame(geom4: Geometry, x) -> AdaptedFrame:
    """Signature-pivoted Gram-Schmidt followed by ``j``-completion."""
    if geom4.dim != 4:
        raise HodgeError("adapted frames are defined for 4-dimensional geometries")
    x = np.asarray(x, dtype=float)
    g, j = geom4.g(x), geom4.j(x)
    case = "pseudo" if geom4.epsilon == 1 else "para"
    signs = expected_signs(case)
    cands = _candidates(g)
    e1 = _pick(cands, g, signs[0], lambda v: v)
    e1p = j @ e1
    span = [(e1, signs[0]), (e1p, signs[1])]

    def project(v):
        for e, s in span:
            v = v - (v @ g @ e) / s * e
        return v

    e2 = _pick(cands, g, signs[2], project)
    E = np.column_stack([e1, e1p, e2, j @ e2])
    frame = AdaptedFrame(E, case, signs, x, int(np.sign(np.linalg.det(E))))
    res = frame.residuals(geom4)
    if max(res.values()) > 1e-9:
        raise HodgeError(f"adapted frame failed its invariants: {res}")
    return frame


@dataclass
class BivectorOps:
    lambda_metric: np.ndarray
    star6: np.ndarray
    eplus: np.ndarray  # rows E1+, E2+, E3+ in the basis B
    eminus: np.ndarray

    def norms(self, basis: np.ndarray) -> np.ndarray:
        return np.einsum("ia,ab,ib->i", basis, self.lambda_metric, basis)


def hodge_star(signs) -> np.ndarray:
    """``star6[C, A]``: coefficient of ``B_C`` in ``*B_A`` for an orthonormal frame."""
    star = np.zeros((6, 6))
    for A, (a, b) in enumerate(PAIRS):
        c, d = (i for i in range(4) if i not in (a, b))
        star[PAIR_INDEX[(c, d)], A] = signs[a] * signs[b] * _perm_sign((a, b, c, d))
    return star


def eigenbasis(case: str) -> tuple[np.ndarray, np.ndarray]:
    """The unit bivectors ``E_a^+`` and ``E_a^-`` (rows, in the basis B)."""
    s = math.sqrt(2) / 2
    B = np.eye(6)
    i11, i12, i12p, i1p2, i1p2p, i22p = range(6)
    if case == "pseudo":
        plus = [B[i11] + B[i22p], B[i12] + B[i1p2p], B[i12p] - B[i1p2]]
        minus = [B[i11] - B[i22p], B[i12] - B[i1p2p], B[i12p] + B[i1p2]]
    elif case == "para":
        plus = [B[i11] - B[i22p], B[i12] - B[i1p2p], B[i12p] - B[i1p2]]
        minus = [B[i11] + B[i22p], B[i12] + B[i1p2p], B[i12p] + B[i1p2]]
    else:
        raise HodgeError(f"unknown case {case!r}")
    return s * np.array(plus), s * np.array(minus)


def bivector_ops(frame: AdaptedFrame, flip_orientation: bool = False) -> BivectorOps:
    """Induced metric, Hodge star and the ``E^+/E^-`` eigenbasis for a frame.

    ``flip_orientation`` reverses the volume form, which negates the star and
    exchanges the roles of the two eigenspaces.
    """
    signs = frame.signs
    lam = np.diag([signs[a] * signs[b] for a, b in PAIRS])
    star = hodge_star(signs) * (-1.0 if flip_orientation else 1.0)
    plus, minus = eigenbasis(frame.case)
    if flip_orientation:
        plus, minus = minus, plus
    for rows, sign in ((plus, 1.0), (minus, -1.0)):
        if max_abs(star @ rows.T - sign * rows.T) > 1e-12:
            raise HodgeError("eigenbasis does not diagonalize the Hodge star; orientation bug")
    return BivectorOps(lam, star, plus, minus)


def _frame_tensor(t4, E):
    return np.einsum("abcd,aA,bB,cC,dD->ABCD", t4, E, E, E, E, optimize=True)


def _as_matrix6(tf) -> np.ndarray:
    m = np.empty((6, 6))
    for A, (a, b) in enumerate(PAIRS):
        for B, (c, d) in enumerate(PAIRS):
            m[A, B] = tf[a, b, c, d]
    return m


def _parse_component(label: str):
    """``"11'1'2"`` to frame indices ``(0, 1, 1, 2)``."""
    out, i = [], 0
    while i < len(label):
        name = label[i]
        if i + 1 < len(label) and label[i + 1] == "'":
            name += "'"
            i += 1
        out.append(NAMES.index(name))
        i += 1
    return tuple(out)


# Relations between frame components of Rm implied by the j-symmetries
# (lhs, sign, rhs): R_lhs = sign * R_rhs.
TABLE_RELATIONS = {
    "pseudo": [
        ("11'1'2", -1, "11'12'"), ("11'1'2'", 1, "11'12"), ("121'2", -1, "1212'"),
        ("121'2'", 1, "1212"), ("12'1'2", -1, "12'12'"), ("12'1'2'", 1, "1212'"),
        ("1'21'2", 1, "12'12'"), ("1'21'2'", -1, "1212'"), ("1'222'", -1, "12'22'"),
        ("1'2'1'2'", 1, "1212"), ("1'2'22'", 1, "1222'"),
    ],
    "para": [
        ("11'1'2", -1, "11'12'"), ("11'1'2'", -1, "11'12"), ("121'2", -1, "1212'"),
        ("121'2'", -1, "1212"), ("12'1'2", -1, "12'12'"), ("12'1'2'", -1, "1212'"),
        ("1'21'2", 1, "12'12'"), ("1'21'2'", 1, "1212'"), ("1'222'", -1, "12'22'"),
        ("1'2'1'2'", 1, "1212"), ("1'2'22'", -1, "1222'"),
    ],
}


@dataclass
class CurvatureOperator:
    """Curvature as a symmetric form on bivectors, ``R(ea^eb, ec^ed) = Rm(ea, eb, ec, ed)``."""

    matrix6: np.ndarray
    lambda_metric: np.ndarray
    star6: np.ndarray
    frame_tensor: np.ndarray
    frame_ricci: np.ndarray
    scal: float
    relation_residual: float
    ricci_offdiag: float

    def invariants(self) -> dict[str, float]:
        lam, star = self.lambda_metric, self.star6
        pos = int(np.sum(np.diag(lam) > 0))
        return {
            "star_squared": max_abs(star @ star - np.eye(6)),
            "star_self_adjoint": max_abs(lam @ star - (lam @ star).T),
            "lambda_signature_ok": 0.0 if (pos, 6 - pos) == (2, 4) else 1.0,
            "symmetric": max_abs(self.matrix6 - self.matrix6.T),
        }


def curvature_operator(geom4: Geometry, x, frame: AdaptedFrame | None = None) -> CurvatureOperator:
    """Assemble the 6x6 curvature form in the frame and check the tabulated relations."""
    x = np.asarray(x, dtype=float)
    frame = frame or adapted_frame(geom4, x)
    suite = G.curvature_suite(geom4, x)
    E = frame.vectors
    rf = _frame_tensor(suite.riemann_0_4, E)
    ops = bivector_ops(frame)
    scale = max(max_abs(rf), 1.0)
    worst = 0.0
    for lhs, sign, rhs in TABLE_RELATIONS[frame.case]:
        worst = max(worst, abs(rf[_parse_component(lhs)] - sign * rf[_parse_component(rhs)]) / scale)
    ric_f = E.T @ suite.ricci @ E
    offdiag = max(abs(ric_f[0, 1]), abs(ric_f[2, 3])) / max(max_abs(ric_f), 1.0)
    return CurvatureOperator(
        _as_matrix6(rf), ops.lambda_metric, ops.star6, rf, ric_f, suite.scalar, worst, offdiag
    )


@dataclass
class WeylBlocks:
    """Weyl form in the Hodge eigenbasis, at display normalization.

    ``w_plus[a, b] = 2 W(E_a^+, E_b^+)`` and similarly for ``w_minus`` and
    ``offdiag`` (rows ``E^+``, columns ``E^-``).
    """

    w_plus: np.ndarray
    w_minus: np.ndarray
    offdiag: np.ndarray
    scal: float
    case: str
    plus_norms: np.ndarray
    minus_norms: np.ndarray
    bilinear6: np.ndarray

    def traces(self) -> tuple[float, float]:
        return (
            float(np.sum(self.plus_norms * np.diag(self.w_plus))),
            float(np.sum(self.minus_norms * np.diag(self.w_minus))),
        )

    def expected_w_minus(self) -> np.ndarray:
        return self.scal * (PSEUDO_W_MINUS if self.case == "pseudo" else PARA_W_MINUS)


def weyl_blocks(geom4: Geometry, x, frame: AdaptedFrame | None = None,
                flip_orientation: bool = False) -> WeylBlocks:
    """Weyl tensor ``Rm - Ric^g/2 + Scal/12 g^g`` cut into Hodge blocks."""
    x = np.asarray(x, dtype=float)
    frame = frame or adapted_frame(geom4, x)
    suite = G.curvature_suite(geom4, x)
    W = weyl_direct(suite.riemann_0_4, suite.ricci, suite.scalar, suite.metric)
    W6 = _as_matrix6(_frame_tensor(W, frame.vectors))
    ops = bivector_ops(frame, flip_orientation)
    P, M = ops.eplus, ops.eminus
    return WeylBlocks(
        DISPLAY_SCALE * P @ W6 @ P.T,
        DISPLAY_SCALE * M @ W6 @ M.T,
        DISPLAY_SCALE * P @ W6 @ M.T,
        suite.scalar,
        frame.case,
        ops.norms(P),
        ops.norms(M),
        W6,
    )


def pattern_deviation(w: np.ndarray, pattern: np.ndarray) -> float:
    """``min_k max|w - k pattern|`` (least-squares ``k``), to test proportionality."""
    k = float(np.sum(w * pattern) / np.sum(pattern * pattern))
    return max_abs(w - k * pattern)


@dataclass
class DualityVerdict:
    max_offdiag: float
    max_w_minus: float
    max_w_plus: float
    max_scal: float
    verdict: bool
    points: int
    flip_orientation: bool


def duality_audit(geom4: Geometry, points, threshold: float = 1e-7,
                  flip_orientation: bool = False) -> DualityVerdict:
    """Check pointwise that ``W^- = 0`` exactly when ``Scal = 0``."""
    points = list(points)
    if len(points) < 8:
        raise HodgeError("duality_audit needs at least 8 points")
    off = wm = wp = sc = 0.0
    verdict = True
    for x in points:
        b = weyl_blocks(geom4, x, flip_orientation=flip_orientation)
        m, s = max_abs(b.w_minus), abs(b.scal)
        off, wm, wp, sc = max(off, max_abs(b.offdiag)), max(wm, m), max(wp, max_abs(b.w_plus)), max(sc, s)
        verdict &= (m < threshold) == (s < threshold)
    return DualityVerdict(off, wm, wp, sc, bool(verdict), len(points), flip_orientation)
