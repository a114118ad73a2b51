"""Truncated multivariate Taylor arithmetic (forward-mode jets).

A :class:`Jet` holds the Taylor coefficients of a (tensor-valued) function
about a base point, truncated at total degree ``order`` (0..3).  Coefficients
are stored densely as an array of shape ``(ncoef, *shape)`` whose first axis
runs over the multi-indices of :class:`JetBasis`, graded by degree.  Since the
coefficients are Taylor coefficients, ``c[alpha] = d^alpha f / alpha!``.

Arithmetic is exact up to the truncation order; elementary functions are
expanded through their Taylor series about the value of the argument, which
is the Faa di Bruno formula applied to the nilpotent part.

>>> x, y = variables([3.0, 5.0], order=2)
>>> f = x * y
>>> f.value, f.derivative((1, 0)), f.derivative((1, 1))
(15.0, 5.0, 1.0)
"""

from __future__ import annotations

import itertools
import math
import string
from functools import lru_cache

import numpy as np

MAX_ORDER = 3
DOMAIN_MARGIN = 1e-12  # below this, singular elementary functions raise


class JetError(ValueError):
    """Raised on malformed jet operations (mismatched bases, bad indices)."""


class JetDomainError(JetError):
    """Raised when an elementary function is evaluated outside its domain."""


class JetBasis:
    """Multi-index bookkeeping for jets in ``nvars`` variables up to ``order``."""

    def __init__(self, nvars: int, order: int):
        if nvars < 1:
            raise JetError(f"nvars must be positive, got {nvars}")
        if not 0 <= order <= MAX_ORDER:
            raise JetError(f"jet order must lie in 0..{MAX_ORDER}, got {order}")
        self.nvars = nvars
        self.order = order
        multis = []
        for deg in range(order + 1):
            for combo in itertools.combinations_with_replacement(range(nvars), deg):
                alpha = [0] * nvars
                for i in combo:
                    alpha[i] += 1
                multis.append(tuple(alpha))
        self.multis = multis
        self.index = {alpha: k for k, alpha in enumerate(multis)}
        self.degree = np.array([sum(a) for a in multis])
        self.size = len(multis)
        self.factorial = np.array(
            [math.prod(math.factorial(a) for a in alpha) for alpha in multis], dtype=float
        )

        left, right, target = [], [], []
        for i, a in enumerate(multis):
            for j, b in enumerate(multis):
                if self.degree[i] + self.degree[j] <= order:
                    left.append(i)
                    right.append(j)
                    target.append(self.index[tuple(p + q for p, q in zip(a, b))])
        perm = np.argsort(target, kind="stable")
        self.pair_left = np.asarray(left)[perm]
        self.pair_right = np.asarray(right)[perm]
        pair_target = np.asarray(target)[perm]
        # every target occurs (pair (0, k)), so reduceat segments are never empty
        self.segment_starts = np.searchsorted(pair_target, np.arange(self.size))

    def __repr__(self) -> str:
        return f"JetBasis(nvars={self.nvars}, order={self.order})"

    @lru_cache(maxsize=None)
    def diff_map(self, var: int) -> tuple[np.ndarray, np.ndarray]:
        lower = get_basis(self.nvars, self.order - 1)
        src = np.empty(lower.size, dtype=int)
        factor = np.empty(lower.size)
        for k, beta in enumerate(lower.multis):
            up = list(beta)
            up[var] += 1
            src[k] = self.index[tuple(up)]
            factor[k] = up[var]
        return src, factor


@lru_cache(maxsize=None)
def get_basis(nvars: int, order: int) -> JetBasis:
    return JetBasis(nvars, order)


def _as_array(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


class Jet:
    """Truncated Taylor expansion of an array-valued function.

    Parameters
    ----------
    coeffs : ndarray, shape (basis.size, *shape)
        Taylor coefficients, first axis indexed by ``basis.multis``.
    basis : JetBasis
    """

    __slots__ = ("coeffs", "basis")
    __array_ufunc__ = None  # make numpy defer to the reflected operators

    def __init__(self, coeffs, basis: JetBasis):
        coeffs = _as_array(coeffs)
        if coeffs.shape[:1] != (basis.size,):
            raise JetError(f"coefficient array {coeffs.shape} does not match {basis}")
        self.coeffs = coeffs
        self.basis = basis

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, basis: JetBasis) -> "Jet":
        value = _as_array(value)
        coeffs = np.zeros((basis.size,) + value.shape)
        coeffs[0] = value
        return cls(coeffs, basis)

    # -- inspection -------------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.coeffs.shape[1:]

    @property
    def order(self) -> int:
        return self.basis.order

    @property
    def nvars(self) -> int:
        return self.basis.nvars

    @property
    def value(self):
        v = self.coeffs[0]
        return float(v) if v.ndim == 0 else v.copy()

    def coeff(self, alpha) -> np.ndarray | float:
        """Taylor coefficient of the monomial ``x**alpha``."""
        k = self._lookup(alpha)
        v = self.coeffs[k]
        return float(v) if v.ndim == 0 else v.copy()

    def derivative(self, alpha) -> np.ndarray | float:
        """Partial derivative ``d^alpha f`` at the base point."""
        k = self._lookup(alpha)
        v = self.coeffs[k] * self.basis.factorial[k]
        return float(v) if np.ndim(v) == 0 else v

    def gradient(self) -> np.ndarray:
        """First derivatives, shape ``(nvars, *shape)``."""
        if self.order < 1:
            raise JetError("gradient needs a jet of order >= 1")
        return self.coeffs[1 : 1 + self.nvars].copy()

    def _lookup(self, alpha) -> int:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.nvars:
            raise JetError(f"multi-index {alpha} has wrong length for {self.nvars} variables")
        try:
            return self.basis.index[alpha]
        except KeyError:
            raise JetError(f"multi-index {alpha} exceeds truncation order {self.order}") from None

    def __repr__(self) -> str:
        return f"Jet(value={self.coeffs[0]!r}, nvars={self.nvars}, order={self.order})"

    # -- structural -------------------------------------------------------
    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.coeffs[(slice(None),) + idx], self.basis)

    def __len__(self) -> int:
        return self.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Jet(self.coeffs.reshape((self.basis.size,) + tuple(shape)), self.basis)

    @property
    def T(self) -> "Jet":
        nd = len(self.shape)
        return Jet(np.transpose(self.coeffs, (0,) + tuple(range(nd, 0, -1))), self.basis)

    def transpose(self, *axes) -> "Jet":
        return Jet(np.transpose(self.coeffs, (0,) + tuple(a + 1 for a in axes)), self.basis)

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axis = tuple(range(len(self.shape)))
        elif isinstance(axis, int):
            axis = (axis,)
        return Jet(self.coeffs.sum(axis=tuple(a % len(self.shape) + 1 for a in axis)), self.basis)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetError(f"cannot raise jet order {self.order} to {order}")
        lower = get_basis(self.nvars, order)
        return Jet(self.coeffs[: lower.size], lower)

    def diff(self, var: int) -> "Jet":
        """Partial derivative along variable ``var``; the order drops by one."""
        if not 0 <= var < self.nvars:
            raise JetError(f"variable index {var} out of range for {self.nvars} variables")
        if self.order < 1:
            raise JetError("cannot differentiate a jet of order 0")
        src, factor = self.basis.diff_map(var)
        lower = get_basis(self.nvars, self.order - 1)
        f = factor.reshape((-1,) + (1,) * len(self.shape))
        return Jet(self.coeffs[src] * f, lower)

    def jacobian(self) -> "Jet":
        """All first partials stacked on a new leading axis (order drops by one)."""
        return stack([self.diff(i) for i in range(self.nvars)])

    def compose(self, inner) -> "Jet":
        """Substitute a jet argument into this Taylor polynomial.

        ``self`` is the expansion of ``f`` about ``x0`` in its own variables and
        ``inner`` is a vector jet (shape ``(nvars,)``) with value ``x0`` in some
        other set of variables.  Returns ``f(inner)`` truncated at
        ``inner.order``.
        """
        if not isinstance(inner, Jet):
            inner = stack(list(inner))
        if inner.shape != (self.nvars,):
            raise JetError(f"compose needs an inner vector of length {self.nvars}")
        if inner.order > self.order:
            raise JetError("outer jet order is lower than the requested result order")
        x0 = inner.coeffs[0]
        h = [inner[i] - x0[i] for i in range(self.nvars)]
        ib = inner.basis
        monos = np.zeros((self.basis.size, ib.size))
        monos[0, 0] = 1.0
        mono_jets = {self.basis.multis[0]: None}
        for k, alpha in enumerate(self.basis.multis[1:], start=1):
            if self.basis.degree[k] > ib.order:
                break
            i = next(p for p, a in enumerate(alpha) if a)
            prev = list(alpha)
            prev[i] -= 1
            prev = tuple(prev)
            m = h[i] if mono_jets[prev] is None else mono_jets[prev] * h[i]
            mono_jets[alpha] = m
            monos[k] = m.coeffs
        coeffs = np.tensordot(monos, self.coeffs, axes=([0], [0]))
        return Jet(coeffs, ib)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Jet") -> None:
        if other.basis is not self.basis:
            raise JetError(f"cannot combine jets over {self.basis} and {other.basis}")

    def _aligned(self, target_ndim: int) -> np.ndarray:
        pad = target_ndim - len(self.shape)
        if pad == 0:
            return self.coeffs
        return self.coeffs.reshape((self.basis.size,) + (1,) * pad + self.shape)

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            nd = max(len(self.shape), len(other.shape))
            return Jet(self._aligned(nd) + other._aligned(nd), self.basis)
        other = _as_array(other)
        nd = max(len(self.shape), other.ndim)
        coeffs = np.array(np.broadcast_to(self._aligned(nd), (self.basis.size,) + np.broadcast_shapes(self.shape, other.shape)))
        coeffs[0] = coeffs[0] + other
        return Jet(coeffs, self.basis)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.basis)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            b = self.basis
            nd = max(len(self.shape), len(other.shape))
            prod = self._aligned(nd)[b.pair_left] * other._aligned(nd)[b.pair_right]
            return Jet(np.add.reduceat(prod, b.segment_starts, axis=0), b)
        other = _as_array(other)
        nd = max(len(self.shape), other.ndim)
        return Jet(self._aligned(nd) * other, self.basis)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / _as_array(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * _as_array(other)

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        if float(p).is_integer() and 0 <= p <= 8:
            out = Jet.constant(np.ones(self.shape), self.basis)
            for _ in range(int(p)):
                out = out * self
            return out
        return power(self, float(p))

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def reciprocal(self) -> "Jet":
        v = self.coeffs[0]
        if np.any(np.abs(v) < DOMAIN_MARGIN):
            raise JetDomainError(f"division by a jet with value {v!r} (|value| < {DOMAIN_MARGIN})")
        derivs = [(-1.0) ** k * math.factorial(k) / v ** (k + 1) for k in range(self.order + 1)]
        return _taylor_apply(self, derivs)


def _taylor_apply(a: Jet, derivs) -> Jet:
    """f(a) = sum_k f^(k)(a0)/k! (a - a0)^k, with ``derivs[k] = f^(k)(a0)``."""
    a0 = a.coeffs[0]
    h = a - a0
    out = Jet.constant(derivs[0], a.basis)
    power_h = None
    for k in range(1, a.order + 1):
        power_h = h if power_h is None else power_h * h
        out = out + power_h * (np.asarray(derivs[k]) / math.factorial(k))
    return out


def exp(a):
    if not isinstance(a, Jet):
        return np.exp(a)
    e = np.exp(a.coeffs[0])
    return _taylor_apply(a, [e] * (a.order + 1))


def log(a):
    if not isinstance(a, Jet):
        return np.log(a)
    v = a.coeffs[0]
    if np.any(v <= DOMAIN_MARGIN):
        raise JetDomainError(f"log of a jet with value {v!r} (needs value > {DOMAIN_MARGIN})")
    derivs = [np.log(v)] + [(-1.0) ** (k - 1) * math.factorial(k - 1) / v**k for k in range(1, a.order + 1)]
    return _taylor_apply(a, derivs)


def power(a, p: float):
    if not isinstance(a, Jet):
        return np.power(a, p)
    v = a.coeffs[0]
    if np.any(v <= DOMAIN_MARGIN):
        raise JetDomainError(f"pow({p}) of a jet with value {v!r} (needs value > {DOMAIN_MARGIN})")
    derivs = []
    falling = 1.0
    for k in range(a.order + 1):
        derivs.append(falling * v ** (p - k))
        falling *= p - k
    return _taylor_apply(a, derivs)


def sqrt(a):
    if not isinstance(a, Jet):
        return np.sqrt(a)
    try:
        return power(a, 0.5)
    except JetDomainError:
        raise JetDomainError(f"sqrt of a jet with value {a.coeffs[0]!r}") from None


def sin(a):
    if not isinstance(a, Jet):
        return np.sin(a)
    s, c = np.sin(a.coeffs[0]), np.cos(a.coeffs[0])
    return _taylor_apply(a, [s, c, -s, -c][: a.order + 1])


def cos(a):
    if not isinstance(a, Jet):
        return np.cos(a)
    s, c = np.sin(a.coeffs[0]), np.cos(a.coeffs[0])
    return _taylor_apply(a, [c, -s, -c, s][: a.order + 1])


def arithmetic(a, b, op: str):
    """Apply a named operation; unary ops ignore ``b``."""
    binary = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
        "pow": lambda: a**b,
    }
    unary = {"exp": exp, "log": log, "sqrt": sqrt}
    if op in binary:
        if isinstance(a, Jet) and isinstance(b, Jet) and a.basis is not b.basis:
            raise JetError(f"{op}: operands have different bases ({a.basis} vs {b.basis})")
        return binary[op]()
    if op in unary:
        return unary[op](a)
    raise JetError(f"unknown operation {op!r}")


# -- constructors ----------------------------------------------------------
def seed(point, var_index: int, order: int) -> Jet:
    """The coordinate function ``x[var_index]`` expanded about ``point``."""
    point = np.atleast_1d(_as_array(point))
    if not 1 <= order <= MAX_ORDER:
        raise JetError(f"seed order must lie in 1..{MAX_ORDER}, got {order}")
    if not 0 <= var_index < point.size:
        raise JetError(f"variable index {var_index} out of range for {point.size} variables")
    return variables(point, order)[var_index]


def variables(point, order: int) -> Jet:
    """All coordinate functions at ``point`` as one vector jet."""
    point = np.atleast_1d(_as_array(point))
    basis = get_basis(point.size, order)
    coeffs = np.zeros((basis.size, point.size))
    coeffs[0] = point
    if order >= 1:
        coeffs[1 : 1 + point.size] = np.eye(point.size)
    return Jet(coeffs, basis)


def _find_basis(items):
    for it in items:
        if isinstance(it, Jet):
            return it.basis
    return None


def stack(items, axis: int = 0) -> Jet | np.ndarray:
    """``np.stack`` over a mix of jets and constants."""
    items = list(items)
    basis = _find_basis(items)
    if basis is None:
        return np.stack([_as_array(i) for i in items], axis=axis)
    jets = [i if isinstance(i, Jet) else Jet.constant(i, basis) for i in items]
    for j in jets:
        if j.basis is not basis:
            raise JetError("cannot stack jets over different bases")
    shape = np.broadcast_shapes(*(j.shape for j in jets))
    nd = len(shape)
    arrays = [np.broadcast_to(j._aligned(nd), (basis.size,) + shape) for j in jets]
    ax = axis + 1 if axis >= 0 else axis
    return Jet(np.stack(arrays, axis=ax), basis)


def array(nested) -> Jet | np.ndarray:
    """Build a jet array from a nested list of jets and numbers."""
    if isinstance(nested, (list, tuple)):
        return stack([array(n) for n in nested])
    return nested


def value_of(x):
    return x.value if isinstance(x, Jet) else _as_array(x)


# -- tensor algebra --------------------------------------------------------
def _parse(subscripts: str, n: int):
    lhs, out = subscripts.replace(" ", "").split("->")
    ins = lhs.split(",")
    if len(ins) != n:
        raise JetError(f"einsum '{subscripts}' expects {len(ins)} operands, got {n}")
    return ins, out


def einsum(subscripts: str, *operands):
    """``np.einsum`` for jets and arrays (explicit ``->`` form, no ellipsis)."""
    ins, out = _parse(subscripts, len(operands))
    if not any(isinstance(o, Jet) for o in operands):
        return np.einsum(subscripts, *[_as_array(o) for o in operands], optimize=True)
    if len(operands) == 1:
        return _einsum2(ins[0], None, operands[0], None, out)
    acc, acc_sub = operands[0], ins[0]
    for k in range(1, len(operands)):
        later = set("".join(ins[k + 1 :]) + out)
        keep = "".join(dict.fromkeys(c for c in acc_sub + ins[k] if c in later))
        if k == len(operands) - 1:
            keep = out
        acc = _einsum2(acc_sub, ins[k], acc, operands[k], keep)
        acc_sub = keep
    return acc


def _einsum2(sa, sb, a, b, out):
    letters = set(sa + (sb or "") + out)
    p = next(c for c in string.ascii_letters if c not in letters)
    if b is None:
        if isinstance(a, Jet):
            return Jet(np.einsum(f"{p}{sa}->{p}{out}", a.coeffs), a.basis)
        return np.einsum(f"{sa}->{out}", a)
    ja, jb = isinstance(a, Jet), isinstance(b, Jet)
    if ja and jb:
        if a.basis is not b.basis:
            raise JetError("einsum over jets with different bases")
        bs = a.basis
        prod = np.einsum(f"{p}{sa},{p}{sb}->{p}{out}", a.coeffs[bs.pair_left], b.coeffs[bs.pair_right], optimize=True)
        return Jet(np.add.reduceat(prod, bs.segment_starts, axis=0), bs)
    if ja:
        return Jet(np.einsum(f"{p}{sa},{sb}->{p}{out}", a.coeffs, _as_array(b), optimize=True), a.basis)
    if jb:
        return Jet(np.einsum(f"{sa},{p}{sb}->{p}{out}", _as_array(a), b.coeffs, optimize=True), b.basis)
    return np.einsum(f"{sa},{sb}->{out}", _as_array(a), _as_array(b), optimize=True)


def matmul(a, b):
    sa = "ij"[2 - np.ndim(value_of(a)) :] if np.ndim(value_of(a)) <= 2 else None
    sb = "jk"[: np.ndim(value_of(b))] if np.ndim(value_of(b)) <= 2 else None
    if sa is None or sb is None or not sa or not sb:
        raise JetError("matmul supports vectors and matrices only")
    if len(sa) == 1:
        sa = "j"
    out = "".join(c for c in sa + sb if (sa + sb).count(c) == 1)
    return einsum(f"{sa},{sb}->{out}", a, b)


def inv(a):
    """Matrix inverse, exact to the truncation order."""
    if not isinstance(a, Jet):
        return np.linalg.inv(a)
    a0 = a.coeffs[0]
    if abs(np.linalg.det(a0)) < 1e-10:
        raise JetDomainError(f"matrix is singular at the base point (det={np.linalg.det(a0):.3e})")
    b0 = np.linalg.inv(a0)
    step = -(b0 @ (a - a0))  # nilpotent
    term = Jet.constant(b0, a.basis)
    total = term
    for _ in range(a.order):
        term = matmul(step, term)
        total = total + term
    return total


def trace(a):
    return einsum("ii->", a)
