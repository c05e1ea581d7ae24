"""Command line entry point: ``prequant verify``, ``prequant build`` and ``--list-suites``.

Exit status is 0 when every check passes, 1 when some check fails and 2 for
configuration or data errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from . import __version__
from .datasets import DataError, default_data_path, load_zoo
from .observables import NotClosedError
from .suites import SUITES, SuiteConfig, run_suite

SCHEMA_VERSION = 1
BUILD_KINDS = ("poisson-r2", "r3-2plectic", "string-su2", "heisenberg-r2")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def build_report(suite: str, cfg: SuiteConfig, data_path: Path, records, wall_time: float | None = None) -> dict:
    checks = [r.as_dict() for r in records]
    failed = sum(1 for c in checks if not c["passed"])
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "prequant",
        "version": __version__,
        "suite": suite,
        "seed": cfg.seed,
        "config": {"samples": cfg.samples, "poly_degree": cfg.poly_degree, "truncation": cfg.truncation},
        "data": {"file": data_path.name, "sha256": hashlib.sha256(data_path.read_bytes()).hexdigest()},
        "summary": {"checks": len(checks), "passed": len(checks) - failed, "failed": failed},
        "checks": checks,
    }
    if wall_time is not None:
        report["wall_time_seconds"] = round(wall_time, 3)
    return report


def _cmd_verify(args) -> int:
    cfg = SuiteConfig(args.seed, args.samples, args.poly_degree, args.truncation)
    try:
        cfg.validate()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        path = Path(args.data) if args.data else default_data_path()
        if path.is_dir():
            path = path / "zoo.yaml"
        zoo = load_zoo(path)
    except NotClosedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    start = time.perf_counter()
    records = run_suite(args.suite, zoo, cfg)
    wall = time.perf_counter() - start if args.timing else None
    report = build_report(args.suite, cfg, path, records, wall)
    text = _dump(report)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    else:
        sys.stdout.write(text)
    s = report["summary"]
    print(f"{args.suite}: {s['passed']}/{s['checks']} checks passed", file=sys.stderr)
    return EXIT_OK if s["failed"] == 0 else EXIT_FAIL


def _cmd_build(args) -> int:
    from .examples import build_example

    try:
        path = build_example(args.kind, Path(args.out))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(str(path), file=sys.stderr)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prequant", description="Exact verification of higher prequantization identities.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--list-suites", action="store_true", help="print the suite names and exit")
    sub = p.add_subparsers(dest="command")
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES) + ["all"])
    v.add_argument("--data", help="YAML data file or directory (default: $PREQUANT_DATA or the shipped zoo)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--poly-degree", type=int, default=2)
    v.add_argument("--truncation", type=int, default=3)
    v.add_argument("--out", help="report path (default: stdout)")
    v.add_argument("--timing", action="store_true", help="record wall time (makes reports run dependent)")
    b = sub.add_parser("build", help="write an example bundle")
    b.add_argument("kind", choices=BUILD_KINDS)
    b.add_argument("--out", required=True, help="output directory")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    if args.list_suites:
        for name in sorted(SUITES) + ["all"]:
            print(name)
        return EXIT_OK
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "build":
        return _cmd_build(args)
    parser.print_help(sys.stderr)
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
