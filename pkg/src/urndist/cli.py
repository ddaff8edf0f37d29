"""Command-line front end.

Subcommands::

    urndist run      --config cfg.toml --data records.csv --out results/
    urndist validate --config cfg.toml --data records.csv

Exit codes: 0 success (validate: no problems), 1 configuration or usage
error (validate: problems found), 2 data validation failure during run.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .errors import UrndistError
from .kernels import active_backend
from .pipeline import ValidationFailure, run_pipeline, validate_data


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urndist",
        description="Distance trajectories between categorical count "
                    "assemblages under Monte Carlo permutation.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} "
                                f"({active_backend()} kernel)")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the full pipeline")
    run_p.add_argument("--config", required=True, help="TOML run configuration")
    run_p.add_argument("--data", required=True, help="records CSV")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override [run] seed")
    run_p.add_argument("--permutations", type=int, default=None,
                       help="override [run] permutations")
    run_p.add_argument("--workers", type=int, default=1,
                       help="parallel permutation workers (never affects "
                            "output bytes)")
    run_p.add_argument("--metric", choices=["hellinger", "kl"], default=None,
                       help="override [run] metric")
    run_p.add_argument("--mode", choices=["unweighted", "weighted"],
                       default=None, help="override [run] mode")
    run_p.add_argument("--alpha0", type=float, default=None,
                       help="override [run] alpha0 (prior concentration)")
    run_p.add_argument("--hpd-level", type=float, default=None,
                       help="override [density] hpd_level")
    run_p.add_argument("--compact", action="store_true",
                       help="write per-group sample counts instead of the "
                            "full phi table and trajectories")
    run_p.add_argument("--dump-densities", action="store_true",
                       help="write full KDE grids per group")
    run_p.add_argument("--timestamp", action="store_true",
                       help="record wall-clock in the manifest (breaks "
                            "byte-identical reruns)")
    run_p.add_argument("-q", "--quiet", action="store_true")

    val_p = sub.add_parser("validate",
                           help="validate the data and print a report "
                                "without running inference")
    val_p.add_argument("--config", required=True)
    val_p.add_argument("--data", required=True)
    val_p.add_argument("--json", action="store_true",
                       help="emit the report as JSON")
    return parser


def _cmd_run(args) -> int:
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {
        "seed": args.seed,
        "permutations": args.permutations,
        "metric": args.metric,
        "mode": args.mode,
        "alpha0": args.alpha0,
        "hpd_level": args.hpd_level,
    }
    try:
        manifest = run_pipeline(
            args.config, args.data, args.out,
            overrides=overrides, workers=args.workers, compact=args.compact,
            dump_densities=args.dump_densities, timestamp=args.timestamp,
        )
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UrndistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        run = manifest["run"]
        print(f"ok: {run['draw_events']} draw events, "
              f"{run['phi_samples']} phi samples, "
              f"{run['groups']} groups -> {args.out}")
    return 0


def _render_report(report: dict) -> str:
    lines = [
        f"input: {report['input']}",
        f"records: {report['record_count']} "
        f"(skipped outside window: {report['skipped_outside_window']})",
        "",
        "per-project record counts:",
    ]
    for project, n in report["per_project"].items():
        skipped = report["per_project_skipped"].get(project, 0)
        suffix = f" (+{skipped} skipped)" if skipped else ""
        lines.append(f"  {project:<16} {n}{suffix}")
    lines.append("")
    lines.append("per-category totals (records / total count):")
    for cat, stats in report["per_category"].items():
        lines.append(f"  {cat:<24} {stats['records']} / "
                     f"{stats['total_count']:g}")
    lines.append("")
    lines.append("date coverage (interval: years, records, spread mass):")
    for row in report["coverage"]:
        years = f"{row['years'][0]}..{row['years'][1]}"
        lines.append(f"  j={row['interval']:<3} {years:<14} "
                     f"{row['records']:>6}  {row['mass']:.1f}")
    lines.append("")
    if report["problem_count"]:
        lines.append(f"PROBLEMS ({report['problem_count']}):")
        for p in report["problems"]:
            where = f"line {p['line']}" if p["line"] else "input"
            lines.append(f"  {where}: {p['message']}")
    else:
        lines.append("no problems found")
    return "\n".join(lines)


def _cmd_validate(args) -> int:
    try:
        report = validate_data(args.config, args.data)
    except UrndistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(_render_report(report))
    return 1 if report["problem_count"] else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_validate(args)


if __name__ == "__main__":
    sys.exit(main())
