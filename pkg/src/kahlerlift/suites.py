"""Named verification suites, the report format and its serialization.

A suite is a list of checks.  Each check reduces per-point residuals to one
number and compares it with a threshold, either as an upper bound
(comparator ``"<"``, the usual identity check) or as a lower bound
(comparator ``">"``, used for existence statements such as "the Weyl tensor
is somewhere nonzero").  Pass/fail is therefore a function of
``(residual, comparator, threshold)`` alone.

Sampling is deterministic: base points come from ``SplitMix64(seed)``
stream 1 and lifted points from stream 2, so a check sees the same points
no matter which other checks run alongside it.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable

import numpy as np

from . import __version__
from . import curvature as C
from . import geometry as G
from . import hodge as H
from . import jets as J
from . import lift as L
from .geometry import Geometry, max_abs
from .rng import SplitMix64

SCHEMA = 1
SUITES = ("kahler", "lift", "connection", "curvature", "weyl", "hodge", "examples")
ALL = "all"
ORDER3_SUITES = {"connection", "curvature", "weyl", "hodge", ALL}
THREADS_ENV = "KAHLERLIFT_THREADS"
TEXT_WIDTH = 120


class ConfigError(ValueError):
    """Invalid suite configuration (raised before any computation)."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------
@dataclass
class SuiteConfig:
    """What to verify and how.

    Attributes
    ----------
    geometry : str
        Catalog name.
    params : dict
        Geometry parameters, e.g. ``{"r": 2.0}``.
    suite : str
        One of ``SUITES`` or ``"all"``.
    points : int
        Sample points per check (at least 1; a few checks need 8 and
        raise the count themselves).
    seed : int
        Seed of the ``SplitMix64`` sampler, reduced modulo ``2**64``.
    tol_overrides : dict
        Thresholds keyed by full check name (``curvature.ricci``) or by
        suite name (``curvature``); the full name wins.
    report_path : str or None
    jet_order : int
        2 or 3.  Raised to 3 for suites that differentiate curvature.
    """

    geometry: str = "sphere"
    params: dict = field(default_factory=dict)
    suite: str = ALL
    points: int = 32
    seed: int = 42
    tol_overrides: dict = field(default_factory=dict)
    report_path: str | None = None
    jet_order: int = 2

    def validate(self) -> "SuiteConfig":
        if self.suite not in SUITES + (ALL,):
            raise ConfigError(f"unknown suite {self.suite!r}; known: {', '.join(SUITES + (ALL,))}")
        entries = G.catalog_entries()
        if self.geometry not in entries:
            raise ConfigError(f"unknown geometry {self.geometry!r}; known: {', '.join(sorted(entries))}")
        unknown = set(self.params) - set(entries[self.geometry])
        if unknown:
            raise ConfigError(f"{self.geometry} does not take parameter(s) {sorted(unknown)}")
        if int(self.points) < 1:
            raise ConfigError("points must be at least 1")
        if self.jet_order not in (2, 3):
            raise ConfigError("jet_order must be 2 or 3")
        known_checks = {spec.name for spec in REGISTRY}
        for key, value in self.tol_overrides.items():
            if key not in known_checks and key not in SUITES:
                raise ConfigError(f"unknown tolerance key {key!r}")
            if not float(value) > 0:
                raise ConfigError(f"tolerance {key} must be positive")
        return self

    @property
    def effective_jet_order(self) -> int:
        return 3 if self.suite in ORDER3_SUITES else self.jet_order

    def echo(self) -> dict:
        return {
            "geometry": self.geometry,
            "params": {k: float(v) for k, v in sorted(self.params.items())},
            "suite": self.suite,
            "points": int(self.points),
            "seed": int(self.seed) & ((1 << 64) - 1),
            "tol_overrides": {k: float(v) for k, v in sorted(self.tol_overrides.items())},
            "jet_order": self.effective_jet_order,
        }


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------
@dataclass
class CheckRecord:
    name: str
    anchor: str
    residual: float
    threshold: float
    comparator: str
    points: int
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        if self.comparator == "<":
            return bool(self.residual < self.threshold)
        if self.comparator == ">":
            return bool(self.residual > self.threshold)
        raise ValueError(f"unknown comparator {self.comparator!r}")


@dataclass
class VerificationReport:
    checks: list[CheckRecord]
    config: dict
    engine: str = f"kahlerlift {__version__}"
    schema: int = SCHEMA
    timestamp: str = ""

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> dict:
        failed = [c.name for c in self.checks if not c.passed]
        return {
            "checks": len(self.checks),
            "passed": len(self.checks) - len(failed),
            "failed": failed,
            "all_passed": not failed,
        }

    def check(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _num(x: float) -> str:
    return "%.17g" % x


def report_dict(report: VerificationReport, canonical: bool = False) -> dict:
    """The JSON document.  ``canonical`` drops the timestamp and wall times."""
    checks = []
    for c in report.checks:
        rec = {
            "name": c.name,
            "anchor": c.anchor,
            "residual": _num(c.residual),
            "comparator": c.comparator,
            "threshold": _num(c.threshold),
            "passed": c.passed,
            "points": c.points,
            "wall_time": _num(c.wall_time),
        }
        if canonical:
            del rec["wall_time"]
        checks.append(rec)
    doc = {
        "schema": report.schema,
        "engine": report.engine,
        "config": report.config,
        "summary": report.summary(),
        "checks": checks,
        "timestamp": report.timestamp,
    }
    if canonical:
        del doc["timestamp"]
    return doc


def _text_table(report: VerificationReport) -> str:
    head = f"{'check':<34} {'residual':>10} {'cmp':>3} {'threshold':>9} {'ok':<4} {'pts':>4}  identity"
    lines = [
        f"{report.engine}  schema {report.schema}  geometry {report.config.get('geometry')}"
        f"  suite {report.config.get('suite')}  seed {report.config.get('seed')}",
        head,
        "-" * len(head),
    ]
    for c in report.checks:
        row = (
            f"{c.name[:34]:<34} {c.residual:>10.3e} {c.comparator:>3} {c.threshold:>9.1e} "
            f"{'PASS' if c.passed else 'FAIL':<4} {c.points:>4}  "
        )
        lines.append((row + c.anchor)[:TEXT_WIDTH])
    s = report.summary()
    lines.append(f"{s['passed']}/{s['checks']} checks passed")
    return "\n".join(line.rstrip() for line in lines) + "\n"


def emit_report(report: VerificationReport, fmt: str = "json", canonical: bool = False) -> bytes:
    """Serialize a report as JSON (schema 1) or as a fixed-width text table."""
    if fmt == "json":
        return (json.dumps(report_dict(report, canonical), indent=2) + "\n").encode()
    if fmt == "text":
        return _text_table(report).encode()
    raise ConfigError(f"unknown report format {fmt!r}")


def load_report(data: bytes | str) -> VerificationReport:
    """Inverse of ``emit_report(..., 'json')``; recomputed pass flags must match the stored ones."""
    doc = json.loads(data)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported report schema {doc.get('schema')!r}")
    checks = []
    for rec in doc["checks"]:
        c = CheckRecord(
            rec["name"], rec["anchor"], float(rec["residual"]), float(rec["threshold"]),
            rec["comparator"], int(rec["points"]), float(rec.get("wall_time", "0")),
        )
        if c.passed != rec["passed"]:
            raise ValueError(f"stored pass flag of {c.name} contradicts its residual")
        checks.append(c)
    return VerificationReport(checks, doc["config"], doc["engine"], doc["schema"], doc.get("timestamp", ""))


# ---------------------------------------------------------------------------
# suite context
# ---------------------------------------------------------------------------
def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, min(8, os.cpu_count() or 1))


class SuiteContext:
    """Geometry, sampled points and per-point caches shared by the checks."""

    def __init__(self, config: SuiteConfig, threads: int | None = None):
        self.config = config
        self.geom = G.catalog(config.geometry, **config.params)
        self.count = int(config.points)
        self.threads = threads or thread_count()
        root = SplitMix64(config.seed)
        self.base_points = self.geom.sample(root.spawn(1), max(self.count, 8))
        self._tg = None
        self._lifted_points = None
        self._lifted_seed = root.spawn(2)
        self._cache: dict = {}

    @property
    def tg(self) -> L.TangentGeometry:
        if self._tg is None:
            self._tg = L.lift_geometry(self.geom)
        return self._tg

    @property
    def lifted_points(self) -> list[np.ndarray]:
        if self._lifted_points is None:
            self._lifted_points = self.tg.sample(self._lifted_seed, max(self.count, 8))
        return self._lifted_points

    @property
    def four(self) -> tuple[Geometry, bool] | None:
        """The 4-dimensional geometry for the Hodge checks and whether it is a lift."""
        if self.geom.dim == 4:
            return self.geom, False
        if self.geom.dim == 2:
            return self.tg.as_geometry(), True
        return None

    @property
    def four_points(self) -> list[np.ndarray]:
        _, lifted = self.four
        return self.lifted_points if lifted else self.base_points

    @property
    def kind(self) -> str:
        return self.geom.curvature_kind

    def map(self, fn: Callable, points) -> list:
        points = list(points)
        if self.threads <= 1 or len(points) <= 1:
            return [fn(p) for p in points]
        with ThreadPoolExecutor(self.threads) as ex:
            return list(ex.map(fn, points))

    def per_point(self, key: str, fn: Callable, points) -> list:
        """``[fn(p) for p in points]`` cached under ``key``."""
        if key not in self._cache:
            self._cache[key] = self.map(fn, points)
        return self._cache[key]


# ---------------------------------------------------------------------------
# check registry
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class CheckSpec:
    name: str
    anchor: str
    threshold: float
    comparator: str
    run: Callable[[SuiteContext], tuple[float, int]]
    applies: Callable[[SuiteContext], bool] = lambda ctx: True

    @property
    def suite(self) -> str:
        return self.name.split(".", 1)[0]


REGISTRY: list[CheckSpec] = []


def check(name, anchor, threshold, comparator="<", applies=None):
    def deco(fn):
        REGISTRY.append(CheckSpec(name, anchor, threshold, comparator, fn, applies or (lambda ctx: True)))
        return fn

    return deco


def _worst(values) -> float:
    return float(max(values)) if values else 0.0


def _sample_field(d: int) -> Callable:
    """A non-constant base vector field ``(1 + x0 x1, x0^2, 0, ...)``."""

    def f(x):
        comps = [1.0 + x[0] * x[1], x[0] * x[0]] + [0.0 * x[0]] * (d - 2)
        return J.stack(comps)

    return f


def _projectable_frame(d: int) -> list[C.ProjectableField]:
    frame = [C.coordinate_projectable(d, i, v) for i in range(d) for v in (False, True)]
    s = _sample_field(d)
    zero = C.constant_field(np.zeros(d))
    frame += [C.ProjectableField(s, zero), C.ProjectableField(zero, s)]
    return frame


def _surface(ctx) -> bool:
    return ctx.geom.dim == 2


def _constant_surface(ctx) -> bool:
    return ctx.geom.dim == 2 and ctx.kind in ("flat", "constant")


def _curved(ctx) -> bool:
    return ctx.kind != "flat"


# -- kahler -------------------------------------------------------------------
def _kahler(ctx):
    return ctx.per_point("kahler", lambda x: G.kahler_audit(ctx.geom, x), ctx.base_points[: ctx.count])


for _key, _anchor in (
    ("j_squared", "j^2 = -eps Id"),
    ("compatibility", "g(j., j.) = eps g"),
    ("nabla_j", "nabla j = 0 (Levi-Civita)"),
    ("d_omega", "d omega = 0, omega = g(j., .)"),
):
    check(f"kahler.{_key}", _anchor, 1e-8)(
        lambda ctx, _k=_key: (_worst([r[_k] for r in _kahler(ctx)]), ctx.count)
    )


# -- lift ---------------------------------------------------------------------
@check("lift.metric_identity", "g~(U, V) = Omega(U, J~V)", 1e-10)
def _metric_identity(ctx):
    pts = ctx.lifted_points[: ctx.count]
    return _worst(ctx.map(lambda p: L.metric_identity_residual(ctx.tg, p), pts)), len(pts)


@check("lift.liouville", "Omega = pullback of -d(Liouville form) under g-musical map", 1e-9)
def _liouville(ctx):
    pts = ctx.lifted_points[: ctx.count]
    return _worst(ctx.map(lambda p: L.liouville_pullback_audit(ctx.tg, p), pts)), len(pts)


def _compat(ctx):
    pts = ctx.lifted_points[: ctx.count]
    return ctx.per_point("compat", lambda p: L.compatibility_audit(ctx.tg, p), pts)


for _key, _anchor in (
    ("omega_compat", "Omega(J~., J~.) = eps Omega"),
    ("d_omega", "d Omega = 0"),
    ("g_compat", "g~(J~., J~.) = eps g~"),
):
    check(f"lift.{_key}", _anchor, 1e-9)(
        lambda ctx, _k=_key: (_worst([r[_k] for r in _compat(ctx)]), ctx.count)
    )


@check("lift.signature", "g~ has neutral signature (2n, 2n); residual = failing points", 0.5)
def _signature(ctx):
    pts = ctx.lifted_points[: ctx.count]
    half = ctx.tg.dim // 2
    sigs = ctx.map(lambda p: L.signature(ctx.tg.g_tilde(p)), pts)
    return float(sum(s != (half, half) for s in sigs)), len(pts)


def _bracket_fields(d):
    e = np.eye(d)
    return [(C.constant_field(e[0]), C.constant_field(e[1])), (_sample_field(d), C.constant_field(e[1]))]


def _brackets(ctx):
    pts = ctx.lifted_points[: ctx.count]
    pairs = _bracket_fields(ctx.geom.dim)

    def one(p):
        out = {"vv": 0.0, "hv": 0.0, "hh": 0.0}
        for X, Y in pairs:
            for k, v in L.bracket_audit(ctx.tg, X, Y, p).items():
                out[k] = max(out[k], v)
        return out

    return ctx.per_point("brackets", one, pts)


for _key, _anchor in (
    ("vv", "[X^v, Y^v] = 0"),
    ("hv", "[X^h, Y^v] = (nabla_X Y)^v"),
    ("hh", "[X^h, Y^h] = [X, Y]^h - (R(X, Y) xi)^v"),
):
    check(f"lift.bracket_{_key}", _anchor, 1e-7)(
        lambda ctx, _k=_key: (_worst([r[_k] for r in _brackets(ctx)]), ctx.count)
    )


@check("lift.chart_invariance", "J~ is independent of the chart (quadratic change of coordinates)", 1e-7)
def _chart_invariance(ctx):
    phi = L.PolynomialMap.quadratic_example(0.05, ctx.geom.dim)
    pts = ctx.lifted_points[: ctx.count]
    return _worst(ctx.map(lambda p: L.chart_invariance_audit(ctx.geom, phi, p), pts)), len(pts)


def _almost_square(geom, p):
    m = L.almost_j_tilde_matrix(geom, p)
    return max_abs(m @ m + geom.epsilon * np.eye(m.shape[0]))


@check("lift.almost_j_squared", "J~^2 = -eps Id for the general lift", 1e-9)
def _almost_j(ctx):
    pts = ctx.lifted_points[: ctx.count]
    return _worst(ctx.map(lambda p: _almost_square(ctx.geom, p), pts)), len(pts)


def _nonintegrable_points(ctx):
    geom = L.nonintegrable_structure()
    tg = L.TangentGeometry(geom)
    return geom, tg.sample(SplitMix64(ctx.config.seed).spawn(3), ctx.count)


@check("lift.almost_j_squared_nonintegrable", "J~^2 = -eps Id without integrability", 1e-9)
def _almost_j_ni(ctx):
    geom, pts = _nonintegrable_points(ctx)
    return _worst(ctx.map(lambda p: _almost_square(geom, p), pts)), len(pts)


@check("lift.nijenhuis_nonintegrable", "the test structure is not integrable: max |N_j|", 1e-3, ">")
def _nijenhuis(ctx):
    geom, pts = _nonintegrable_points(ctx)
    return _worst(ctx.map(lambda p: max_abs(L.nijenhuis(geom, p[: geom.dim])), pts)), len(pts)


# -- connection -------------------------------------------------------------
def _nabla(ctx):
    pts = ctx.lifted_points[: ctx.count]
    frame = _projectable_frame(ctx.geom.dim)
    d = ctx.geom.dim
    verticals = [C.coordinate_projectable(d, i, True) for i in range(d)]

    def one(p):
        at = C.NablaAtPoint(ctx.tg, p)
        disc = vert = 0.0
        for Xb in frame:
            for Yb in frame:
                disc = max(disc, C.nabla_tilde(ctx.tg, p, Xb, Yb, strict=False, at=at).discrepancy)
        for Xb in verticals:
            for Yb in frame:
                o = at.oracle(Xb, Yb)
                vert = max(vert, max_abs(o.pi), max_abs(o.k))
        return disc, vert

    return ctx.per_point("nabla", one, pts)


@check("connection.nabla_tilde", "closed-form nabla~ of projectable fields = chart Christoffel oracle", 1e-7)
def _nabla_formula(ctx):
    return _worst([r[0] for r in _nabla(ctx)]), ctx.count


@check("connection.vertical_derivative", "nabla~_{X^v} of a projectable field vanishes", 1e-12)
def _nabla_vertical(ctx):
    return _worst([r[1] for r in _nabla(ctx)]), ctx.count


def _parallel(ctx):
    pts = ctx.lifted_points[: ctx.count]
    return ctx.per_point("parallel", lambda p: C.j_tilde_parallel_audit(ctx.tg, p), pts)


@check("connection.j_tilde_parallel", "nabla~ J~ = 0 (closed form and chart oracle)", 1e-7)
def _j_parallel(ctx):
    return _worst([max(r["formula"], r["direct"]) for r in _parallel(ctx)]), ctx.count


@check("connection.t1_equivariance", "T1(X, jY, V) = j T1(X, Y, V)", 1e-9)
def _t1_equivariance(ctx):
    return _worst([r["t1_equivariance"] for r in _parallel(ctx)]), ctx.count


@check("connection.surface_t1", "T1 on a surface of curvature c equals -c g(V,X)Y (both signs of eps)", 1e-9,
       applies=_constant_surface)
def _surface_t1(ctx):
    geom, c = ctx.geom, ctx.geom.curvature_constant
    e = np.eye(2)

    def one(x):
        t = C.t1_tensor(geom, x)
        return max(
            max_abs(t(e[a], e[b], e[v]) - C.surface_t1(geom, x, e[a], e[b], e[v], c))
            for a in range(2) for b in range(2) for v in range(2)
        )

    pts = ctx.base_points[: ctx.count]
    return _worst(ctx.map(one, pts)), len(pts)


# -- curvature ----------------------------------------------------------------
def _rm(ctx):
    pts = ctx.lifted_points[: ctx.count]

    def one(p):
        res = C.rm_tilde_tensor(ctx.tg, p, strict=False)
        ric = C.ric_scal_tilde(ctx.tg, p, res.formula)
        return {
            "oracle": res.discrepancy, "ricci": ric.residual, "scalar": abs(ric.scalar),
            "max": max_abs(res.formula),
        }

    return ctx.per_point("rm", one, pts)


@check("curvature.rm_tilde_oracle", "closed-form Rm~ = curvature of g~ on the chart (relative)", 1e-6)
def _rm_oracle(ctx):
    return _worst([r["oracle"] for r in _rm(ctx)]), ctx.count


@check("curvature.ricci", "Ric~ = 2 Ric o Pi", 1e-7)
def _ricci(ctx):
    return _worst([r["ricci"] for r in _rm(ctx)]), ctx.count


@check("curvature.scalar", "Scal~ = 0", 1e-7)
def _scalar(ctx):
    return _worst([r["scalar"] for r in _rm(ctx)]), ctx.count


@check("curvature.flat_rm_tilde", "Rm~ = 0 over a flat base", 1e-9, applies=lambda ctx: ctx.kind == "flat")
def _flat_rm(ctx):
    return _worst([r["max"] for r in _rm(ctx)]), ctx.count


@check("curvature.einstein", "g~ is not Einstein: min over lambda of max|Ric~ - lambda g~|", 0.1, ">",
       applies=_curved)
def _einstein(ctx):
    pts = ctx.lifted_points[: max(ctx.count, 8)]
    return C.einstein_residual(ctx.tg, pts)[1], len(pts)


def _hol(ctx):
    pts = ctx.lifted_points[: ctx.count]
    d = ctx.geom.dim
    e = np.eye(d)
    # e0 + e1 is non-null in every catalog chart (e0 alone is null in the para charts)
    X0 = e[0] + e[1]

    def one(p):
        out = {"vertical": 0.0, "diagonal": 0.0, "difference": 0.0, "general": 0.0}
        for X, Y in ((X0, e[1]), (e[0] + 0.5 * e[1], e[0])):
            for k, v in C.hol_identity_audit(ctx.tg, p, X, Y).items():
                out[k] = max(out[k], v)
        jX = ctx.geom.j(p[:d]) @ X0
        values = [
            C.hol_tilde(ctx.tg, p, L.lift_vector(ctx.tg, p, h, v))
            for h, v in ((0 * X0, X0), (X0, X0), (X0, jX))
        ]
        out["spread"] = max(values) - min(values)
        return out

    return ctx.per_point("hol", one, pts)


for _key, _anchor, _tol in (
    ("vertical", "Hol~(X^v) = 0", 1e-10),
    ("diagonal", "Hol~(X^h + X^v) = g(T2(X, jX, X, xi), j jX)", 1e-7),
    ("difference", "Hol~(X^h + (jX)^v) - Hol~(X^h + X^v) = 4 eps Hol(X)", 1e-7),
    ("general", "Hol~(X^h + Y^v) in terms of T2 and R", 1e-7),
):
    check(f"curvature.hol_{_key}", _anchor, _tol)(
        lambda ctx, _k=_key: (_worst([r[_k] for r in _hol(ctx)]), ctx.count)
    )


@check("curvature.hol_nonconstant", "Hol~ is not pointwise constant: spread over X^v, X^h+X^v, X^h+(jX)^v",
       1e-3, ">", applies=_curved)
def _hol_spread(ctx):
    return _worst([r["spread"] for r in _hol(ctx)]), ctx.count


# -- weyl ---------------------------------------------------------------------
def _weyl(ctx):
    pts = ctx.lifted_points[: ctx.count]

    def one(p):
        res = C.weyl_tilde_tensor(ctx.tg, p)
        return max(res.residuals.values()), res.max_component

    return ctx.per_point("weyl", one, pts)


@check("weyl.three_way", "W~: Kulkarni-Nomizu form = T2 form = chart Weyl tensor (relative)", 1e-6)
def _weyl_agree(ctx):
    return _worst([r[0] for r in _weyl(ctx)]), ctx.count


@check("weyl.vanishing", "W~ = 0 over a flat or constant-curvature surface, or a flat base", 1e-7,
       applies=lambda ctx: ctx.kind == "flat" or _constant_surface(ctx))
def _weyl_zero(ctx):
    return _worst([r[1] for r in _weyl(ctx)]), ctx.count


@check("weyl.nonzero", "W~ != 0 somewhere: max |W~| over the samples", 1e-3, ">",
       applies=lambda ctx: ctx.kind == "variable")
def _weyl_nonzero(ctx):
    return _worst([r[1] for r in _weyl(ctx)]), ctx.count


# -- hodge --------------------------------------------------------------------
def _has_four(ctx) -> bool:
    return ctx.geom.dim in (2, 4)


def _hodge(ctx):
    geom4, lifted = ctx.four
    pts = ctx.four_points[: ctx.count]

    def one(x):
        frame = H.adapted_frame(geom4, x)
        op = H.curvature_operator(geom4, x, frame)
        wb = H.weyl_blocks(geom4, x, frame)
        inv = op.invariants()
        return {
            "frame": max(frame.residuals(geom4).values()),
            "star": max(inv.values()),
            "relations": op.relation_residual,
            "ricci_offdiag": op.ricci_offdiag,
            "offdiag": max_abs(wb.offdiag),
            "traces": max(abs(t) for t in wb.traces()),
            "pattern": max_abs(wb.w_minus - wb.expected_w_minus()),
            "w_minus": max_abs(wb.w_minus),
            "w_plus": max_abs(wb.w_plus),
            "scal": abs(wb.scal),
            "deviation": H.pattern_deviation(
                wb.w_plus, H.PSEUDO_W_MINUS if wb.case == "pseudo" else H.PARA_W_MINUS
            ),
        }

    return ctx.per_point("hodge", one, pts)


for _key, _anchor, _tol in (
    ("frame", "adapted frame: e' = je, pseudo-orthonormal, case sign pattern", 1e-9),
    ("star", "star^2 = Id, star self-adjoint, Lambda^2 signature (2,4)", 1e-12),
    ("relations", "j-symmetry relations of the 6x6 curvature operator", 1e-8),
    ("ricci_offdiag", "r_11' = r_22' = 0 in the adapted frame", 1e-8),
    ("offdiag", "Weyl operator commutes with the Hodge star", 1e-7),
    ("traces", "W+ and W- are traceless for the bivector metric", 1e-8),
    ("w_minus_pattern", "W- = Scal diag(1/3,1/6,1/6) (pseudo) / Scal diag(-1/3,-1/6,1/6) (para)", 1e-6),
):
    _field = "pattern" if _key == "w_minus_pattern" else _key
    check(f"hodge.{_key}", _anchor, _tol, applies=_has_four)(
        lambda ctx, _k=_field: (_worst([r[_k] for r in _hodge(ctx)]), ctx.count)
    )


@check("hodge.duality_verdict", "W- = 0 exactly where Scal = 0; residual = disagreeing points", 0.5,
       applies=_has_four)
def _duality(ctx):
    bad = sum((r["w_minus"] < 1e-7) != (r["scal"] < 1e-7) for r in _hodge(ctx))
    return float(bad), ctx.count


def _lifted_surface(ctx) -> bool:
    return ctx.geom.dim == 2


@check("hodge.self_dual", "lifted surface bundle is self-dual: max |W-|", 1e-7, applies=_lifted_surface)
def _self_dual(ctx):
    return _worst([r["w_minus"] for r in _hodge(ctx)]), ctx.count


@check("hodge.anti_self_dual", "lifted bundle over constant curvature: max |W+|", 1e-7,
       applies=lambda ctx: _lifted_surface(ctx) and ctx.kind != "variable")
def _asd(ctx):
    return _worst([r["w_plus"] for r in _hodge(ctx)]), ctx.count


@check("hodge.not_anti_self_dual", "lifted bundle over variable curvature: max |W+|", 1e-4, ">",
       applies=lambda ctx: _lifted_surface(ctx) and ctx.kind == "variable")
def _not_asd(ctx):
    return _worst([r["w_plus"] for r in _hodge(ctx)]), ctx.count


@check("hodge.w_plus_not_scal_pattern", "W+ is not a multiple of the W- Scal pattern", 1e-4, ">",
       applies=lambda ctx: _lifted_surface(ctx) and ctx.kind == "variable")
def _w_plus_pattern(ctx):
    return _worst([r["deviation"] for r in _hodge(ctx)]), ctx.count


# -- examples -----------------------------------------------------------------
for _which in ("complex", "para"):
    check(f"examples.identification_{_which}",
          f"flat {_which} plane: lifted Omega = standard form in the adapted coordinates", 1e-14)(
        lambda ctx, _w=_which: (L.symplectic_identification_audit(_w), 1)
    )


@check("examples.gaussian_curvature", "catalog surface has its stated constant curvature", 1e-8,
       applies=_constant_surface)
def _gauss(ctx):
    c = ctx.geom.curvature_constant
    pts = ctx.base_points[: ctx.count]
    vals = ctx.map(lambda x: abs(G.gaussian_curvature(G.curvature_suite(ctx.geom, x)) - c), pts)
    return _worst(vals), len(pts)


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------
def selected_checks(suite: str) -> list[CheckSpec]:
    specs = REGISTRY if suite == ALL else [s for s in REGISTRY if s.suite == suite]
    return sorted(specs, key=lambda s: s.name)


def _threshold(spec: CheckSpec, overrides: dict) -> float:
    if spec.name in overrides:
        return float(overrides[spec.name])
    return float(overrides.get(spec.suite, spec.threshold))


def run_suite(config: SuiteConfig, threads: int | None = None) -> VerificationReport:
    """Run every applicable check of ``config.suite`` and collect the report."""
    config.validate()
    ctx = SuiteContext(config, threads)
    records = []
    for spec in selected_checks(config.suite):
        if not spec.applies(ctx):
            continue
        t0 = time.perf_counter()
        residual, used = spec.run(ctx)
        residual = float(residual)
        if math.isnan(residual):
            residual = math.inf
        records.append(CheckRecord(
            spec.name, spec.anchor, residual, _threshold(spec, config.tol_overrides),
            spec.comparator, int(used), time.perf_counter() - t0,
        ))
    stamp = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    return VerificationReport(records, config.echo(), timestamp=stamp)
