"""Command line front end: ``kahlerlift verify | catalog | weyl``.

Configuration can come from a flat ``key = value`` file (``--config``) and
from flags; flags win.  The file grammar, one entry per line::

    # comment lines and blank lines are ignored
    geometry   = sphere
    param.r    = 1.0          # geometry parameter r
    suite      = all
    points     = 32
    seed       = 42           # decimal or 0x-prefixed hex
    tol.curvature = 1e-6      # suite-wide or per-check threshold
    report     = out.json
    format     = json         # json or text
    jet_order  = 3

Exit status is 0 when every check passes, 1 when some check fails and 2 for
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from . import geometry as G
from .suites import ALL, SUITES, ConfigError, SuiteConfig, emit_report, run_suite

FILE_KEYS = {"geometry", "suite", "points", "seed", "report", "format", "jet_order"}


def _split_pair(text: str, what: str) -> tuple[str, str]:
    if "=" not in text:
        raise ConfigError(f"{what} must look like key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def parse_config_file(text: str) -> dict:
    """Parse the flat key-value grammar into a settings dict."""
    out: dict = {"params": {}, "tol": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            key, value = _split_pair(line, "config line")
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        if key.startswith("param."):
            out["params"][key[6:]] = value
        elif key.startswith("tol."):
            out["tol"][key[4:]] = value
        elif key in FILE_KEYS:
            out[key] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return out


def _number(value: str, what: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{what} must be a number, got {value!r}") from None


def _integer(value, what: str) -> int:
    try:
        return int(str(value), 0)
    except ValueError:
        raise ConfigError(f"{what} must be an integer, got {value!r}") from None


def build_config(args: argparse.Namespace, forced_suite: str | None = None) -> tuple[SuiteConfig, str]:
    """Merge the optional config file with command-line flags."""
    settings: dict = {"params": {}, "tol": {}}
    if args.config:
        settings = parse_config_file(Path(args.config).read_text())
    for text in args.param or []:
        k, v = _split_pair(text, "--param")
        settings["params"][k] = v
    for text in args.tol or []:
        k, v = _split_pair(text, "--tol")
        settings["tol"][k] = v
    for key in ("geometry", "suite", "points", "seed", "report", "format", "jet_order"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if forced_suite is not None:
        settings["suite"] = forced_suite
    fmt = settings.get("format", "json")
    if fmt not in ("json", "text"):
        raise ConfigError(f"unknown format {fmt!r}")
    config = SuiteConfig(
        geometry=settings.get("geometry", "sphere"),
        params={k: _number(v, f"param {k}") for k, v in settings["params"].items()},
        suite=settings.get("suite", ALL),
        points=_integer(settings.get("points", 32), "points"),
        seed=_integer(settings.get("seed", 42), "seed"),
        tol_overrides={k: _number(v, f"tol {k}") for k, v in settings["tol"].items()},
        report_path=settings.get("report"),
        jet_order=_integer(settings.get("jet_order", 2), "jet_order"),
    )
    return config.validate(), fmt


def _add_run_flags(p: argparse.ArgumentParser, with_suite: bool) -> None:
    p.add_argument("--config", help="flat key=value configuration file")
    p.add_argument("--geometry", help="catalog name (see the catalog subcommand)")
    p.add_argument("--param", action="append", metavar="K=V", help="geometry parameter, repeatable")
    if with_suite:
        p.add_argument("--suite", choices=SUITES + (ALL,))
    p.add_argument("--points", help="sample points per check (default 32)")
    p.add_argument("--seed", help="SplitMix64 seed (default 42)")
    p.add_argument("--tol", action="append", metavar="NAME=T", help="threshold override, repeatable")
    p.add_argument("--report", help="write the report to this file")
    p.add_argument("--format", choices=("json", "text"))
    p.add_argument("--jet-order", dest="jet_order", help="2 or 3 (raised to 3 when needed)")
    p.add_argument("--canonical", action="store_true",
                   help="omit timestamp and wall times so identical runs give identical bytes")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kahlerlift",
        description="Verify the lifted (para-)Kähler structure on tangent bundles numerically.",
    )
    parser.add_argument("--version", action="version", version=f"kahlerlift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_flags(sub.add_parser("verify", help="run verification suites"), with_suite=True)
    sub.add_parser("catalog", help="list catalog geometries and their parameters")
    _add_run_flags(
        sub.add_parser("weyl", help="Hodge/Weyl block checks (shortcut for --suite hodge)"), with_suite=False
    )
    return parser


def _catalog_text() -> str:
    lines = [f"{'name':<16} {'dim':>3} {'eps':>4}  parameters"]
    for name, defaults in sorted(G.catalog_entries().items()):
        geom = G.catalog(name)
        params = ", ".join(f"{k}={v:g}" for k, v in defaults.items()) or "-"
        lines.append(f"{name:<16} {geom.dim:>3} {geom.epsilon:>+4d}  {params}")
    return "\n".join(lines) + "\n"


def _run(args, parser, forced_suite=None) -> int:
    try:
        config, fmt = build_config(args, forced_suite)
    except (ConfigError, OSError) as exc:
        parser.error(str(exc))
    report = run_suite(config)
    payload = emit_report(report, fmt, canonical=args.canonical)
    if config.report_path:
        Path(config.report_path).write_bytes(payload)
        sys.stdout.write(emit_report(report, "text").decode())
    else:
        sys.stdout.write(payload.decode())
    return 0 if report.all_passed else 1


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.command == "catalog":
        sys.stdout.write(_catalog_text())
        return 0
    if args.command == "weyl":
        if not args.geometry:
            parser.error("weyl requires --geometry")
        return _run(args, parser, forced_suite="hodge")
    return _run(args, parser)


if __name__ == "__main__":
    sys.exit(main())
