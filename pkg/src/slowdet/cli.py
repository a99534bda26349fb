"""Command-line front end.

Every verb loads a curve (spec file or ``catalog:<name>[:k=v,...]``),
runs one stage of the pipeline and writes a JSON report. Exit status is
0 on success, 2 when an invariant is violated and 3 on bad input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn

from slowdet.bezout import bezout_audit
from slowdet.bounds import BoundMode, BoundReport, global_bound
from slowdet.catalog import CurveSpec, verify_curve
from slowdet.config import RunConfig, load_config
from slowdet.covering import build_covering_plan, compact_bound, count_points, plan_to_json
from slowdet.error import SlowdetError
from slowdet.points import points_to_csv, scan_points
from slowdet.report import ReportRow, RunReport, check_consistency, rows_to_tsv
from slowdet.rounding import to_mpf, working_precision
from slowdet.specfile import CATALOG_PREFIX, load_curve, parse_catalog_ref

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_INPUT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        msg = f"expected a positive integer, got {text}"
        raise argparse.ArgumentTypeError(msg)
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="slowdet",
        description="Explicit bounds and experiments for rational points on slow curves.",
    )
    parser.add_argument("--precision", type=int, help="working precision in bits")
    parser.add_argument("--seed", type=int, help="seed for randomized audits")
    parser.add_argument("--threads", type=_positive_int, help="worker processes")
    parser.add_argument("--config", type=Path, help="TOML or JSON run configuration")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-o", "--out", type=Path, help="write the JSON report here")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="check the slow certificate on a log grid")
    p.add_argument("spec")
    p.add_argument("--p-max", type=_positive_int)
    p.add_argument("--grid", type=_positive_int, help="number of sample points")
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("bound", help="explicit bound on points of height <= T")
    p.add_argument("spec")
    p.add_argument("T", type=_positive_int)
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("scan", help="search for rational points of height <= T")
    p.add_argument("spec")
    p.add_argument("T", type=_positive_int)
    p.add_argument("--window", nargs=2, metavar=("LO", "HI"), help="parameter window")
    p.add_argument("--csv", type=Path, help="write the points as CSV")
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("cover", help="build and verify a covering plan")
    p.add_argument("spec")
    p.add_argument("T", type=_positive_int)
    p.add_argument("--csv", type=Path, help="write the covered points as CSV")
    p.set_defaults(handler=cmd_cover)

    p = sub.add_parser("bezout-check", help="audit the Bezout formula with random polynomials")
    p.add_argument("spec")
    p.add_argument("--trials", type=_positive_int, default=200)
    p.add_argument("--d-max", type=_positive_int, default=3)
    p.set_defaults(handler=cmd_bezout_check)

    p = sub.add_parser("report", help="point counts against the bound for several T")
    p.add_argument("spec")
    p.add_argument("T", type=_positive_int, nargs="+")
    p.add_argument("--tsv", type=Path, help="write the table here instead of stdout")
    p.set_defaults(handler=cmd_report)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    base = load_config(args.config) if args.config else RunConfig()
    return base.with_overrides(precision=args.precision, seed=args.seed, threads=args.threads)


def _load(spec: str, config: RunConfig) -> CurveSpec:
    overrides: dict[str, Any] = {}
    if spec.startswith(CATALOG_PREFIX):
        name, _ = parse_catalog_ref(spec)
        if name == "zeta":
            overrides["c"] = config.zeta_bezout_constant
        elif name == "gamma":
            overrides["c"] = config.gamma_bezout_constant
    return load_curve(spec, overrides=overrides)


def _bound(curve: CurveSpec, T: int, config: RunConfig) -> BoundReport:
    if curve.mode is BoundMode.COMPACT:
        return compact_bound(curve, T, config=config)
    return global_bound(curve, T, precision=config.precision)


def cmd_certify(args: argparse.Namespace, config: RunConfig, curve: CurveSpec) -> int:
    report = RunReport("certify", curve.name, config)
    if curve.cert is None:
        report.status = "not_applicable"
        report.result = {"reason": f"{curve.mode.value} curve without a slow certificate"}
        report.write(args.out)
        return EXIT_OK
    with report.timed("certify"):
        check = verify_curve(curve, args.p_max or config.p_max, args.grid or config.grid_points)
    report.result = check.to_dict()
    report.status = "ok" if check.ok else "violation"
    report.write(args.out)
    return EXIT_OK if check.ok else EXIT_VIOLATION


def cmd_bound(args: argparse.Namespace, config: RunConfig, curve: CurveSpec) -> int:
    report = RunReport("bound", curve.name, config, T=args.T)
    with report.timed("bound"):
        bound = _bound(curve, args.T, config)
    report.result = bound.to_dict()
    report.write(args.out)
    return EXIT_OK


def cmd_scan(args: argparse.Namespace, config: RunConfig, curve: CurveSpec) -> int:
    report = RunReport("scan", curve.name, config, T=args.T)
    try:
        window = (to_mpf(args.window[0]), to_mpf(args.window[1])) if args.window else None
    except ValueError as e:
        msg = f"bad window {args.window}: {e}"
        raise SlowdetError.invalid_input(msg) from e
    with report.timed("scan"):
        scan = scan_points(curve, args.T, window, config=config)
    report.result = scan.to_dict() | {"points": [p.to_dict() for p in scan.points]}
    if args.csv:
        args.csv.write_text(points_to_csv(scan.points), encoding="utf-8")
    report.write(args.out)
    return EXIT_OK


def cmd_cover(args: argparse.Namespace, config: RunConfig, curve: CurveSpec) -> int:
    report = RunReport("cover", curve.name, config, T=args.T)
    with report.timed("cover"):
        plan = build_covering_plan(curve, args.T, config=config)
    with report.timed("bound"):
        bound = _bound(curve, args.T, config)
    counts = count_points(plan)
    report.result = {
        "plan": plan_to_json(plan),
        "counts": counts,
        "bound": bound.to_dict(),
    }
    if args.csv:
        args.csv.write_text(points_to_csv(plan.points), encoding="utf-8")
    check_consistency(counts["certified"], bound.total, verified=plan.verified)
    report.status = "ok" if plan.verified else "unverified"
    report.write(args.out)
    return EXIT_OK if plan.verified else EXIT_VIOLATION


def cmd_bezout_check(args: argparse.Namespace, config: RunConfig, curve: CurveSpec) -> int:
    report = RunReport("bezout-check", curve.name, config)
    with report.timed("audit"):
        audit = bezout_audit(curve, args.trials, d_max=args.d_max, seed=config.seed)
    report.result = audit.to_dict()
    report.status = "ok" if audit.ok else "violation"
    report.write(args.out)
    return EXIT_OK if audit.ok else EXIT_VIOLATION


def cmd_report(args: argparse.Namespace, config: RunConfig, curve: CurveSpec) -> int:
    report = RunReport("report", curve.name, config)
    rows: list[ReportRow] = []
    for T in sorted(set(args.T)):
        with report.timed(f"T={T}"):
            scan = scan_points(curve, T, config=config)
            bound = _bound(curve, T, config)
        check_consistency(scan.certified, bound.total, verified=True)
        rows.append(ReportRow(T, scan.certified, scan.candidates, bound.total, bound.d))
    report.result = {"rows": [row.to_dict() for row in rows]}
    table = rows_to_tsv(rows)
    if args.tsv:
        args.tsv.write_text(table, encoding="utf-8")
    else:
        print(table, end="")
    if args.out:
        report.write(args.out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler: Callable[[argparse.Namespace, RunConfig, CurveSpec], int] = args.handler
    try:
        config = _config(args)
        with working_precision(config.precision):
            curve = _load(args.spec, config)
            return handler(args, config, curve)
    except SlowdetError as e:
        logger.debug("command failed", exc_info=True)
        print(f"slowdet: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
