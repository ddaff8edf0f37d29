"""End-to-end pipeline: ingest, permute, measure, summarize, write artifacts.

Output directory layout::

    manifest.json              run manifest (config echo, input digests,
                               record/skip counts, sample accounting)
    phi_samples.csv            pooled distance table
                               (comparison,interval,permutation,draw_index,phi)
    phi_groups.csv             compact replacement for the two files above
                               when --compact is set (comparison,interval,n)
    trajectories/<L>_vs_<R>.csv   per-comparison sample streams
    summary.csv                per-(comparison,interval) density summaries
                               (comparison,interval,n,mode,hpd_lo_1,hpd_hi_1,...)
    endpoints.csv              final-draw value per group
                               (comparison,interval,n,final_phi)
    skips.csv                  records excluded as outside the window, if any
    densities/...              full KDE grids (only with --dump-densities)
    errors.json                written instead of results when the input
                               fails validation

Every CSV artifact starts with a ``# manifest=<digest>`` comment line tying
it to the manifest that produced it.  Given identical inputs and seed the
whole directory is byte-identical at any worker count (the optional
``timestamp`` flag adds wall-clock fields to the manifest and is off by
default for that reason).
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import logging
import time
from collections import Counter
from pathlib import Path
from typing import Mapping

from . import __version__
from .config import PipelineSettings, load_config
from .density import summarize
from .engine import PhiTable, run_all
from .errors import ConfigError, UrndistError
from .kernels import active_backend
from .metrics import SQRT2, Metric
from .records import parse_categories, scan_records, spread_records

logger = logging.getLogger(__name__)


class ValidationFailure(UrndistError):
    """The input data failed validation; a machine-readable report exists."""

    def __init__(self, report: dict, report_path: Path | None):
        self.report = report
        self.report_path = report_path
        n = report["problem_count"]
        where = f" (report: {report_path})" if report_path else ""
        super().__init__(f"{n} validation problem(s) in input data{where}")


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _problem_report(data_path, problems) -> dict:
    return {
        "input": str(data_path),
        "problem_count": len(problems),
        "problems": [
            {
                "line": getattr(p, "line", None),
                "key": getattr(p, "key", None),
                "kind": type(p).__name__,
                "message": str(p),
            }
            for p in problems
        ],
    }


def _comparison_label(pair: tuple[str, str]) -> str:
    return f"{pair[0]}_vs_{pair[1]}"


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, digest: str, header: str, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# manifest={digest}\n")
        fh.write(header + "\n")
        fh.writelines(lines)


def validate_data(config_path: str | Path, data_path: str | Path) -> dict:
    """Parse and validate the data without running inference.

    Returns a report: record/skip counts per project, per-category totals,
    a date-coverage histogram over the window, and every validation problem.
    """
    settings = load_config(config_path)
    categories = parse_categories(settings.categories_path)
    records, problems = scan_records(data_path, categories)
    cat_index = {c: i for i, c in enumerate(categories)}
    spreads, skipped = spread_records(records, settings.window, cat_index)

    per_project = Counter(r.project for r in records)
    per_project_skipped = Counter(r.project for r in skipped)
    category_mass = Counter()
    category_records = Counter()
    for r in records:
        category_mass[r.category] += r.count
        category_records[r.category] += 1

    J = settings.window.interval_count
    coverage_records = [0] * J
    coverage_mass = [0.0] * J
    for sp in spreads:
        for j in range(sp.first_interval, sp.last_interval + 1):
            coverage_records[j] += 1
            coverage_mass[j] += sp.value

    return {
        "input": str(data_path),
        "config": str(config_path),
        "categories": list(categories),
        "record_count": len(records),
        "skipped_outside_window": len(skipped),
        "per_project": {p: per_project[p] for p in sorted(per_project)},
        "per_project_skipped": {p: per_project_skipped[p]
                                for p in sorted(per_project_skipped)},
        "per_category": {
            c: {"records": category_records[c], "total_count": category_mass[c]}
            for c in categories
        },
        "window": settings.echo()["window"],
        "coverage": [
            {
                "interval": j,
                "years": list(settings.window.year_range(j)),
                "records": coverage_records[j],
                "mass": coverage_mass[j],
            }
            for j in range(J)
        ],
        "problem_count": len(problems),
        "problems": _problem_report(data_path, problems)["problems"],
    }


def run_pipeline(
    config_path: str | Path,
    data_path: str | Path,
    out_dir: str | Path,
    *,
    overrides: Mapping[str, object] | None = None,
    workers: int = 1,
    compact: bool = False,
    dump_densities: bool = False,
    timestamp: bool = False,
) -> dict:
    """Run the full pipeline and write all artifacts; returns the manifest.

    Raises :class:`ValidationFailure` after writing ``errors.json`` when the
    data does not validate, and :class:`ConfigError` for bad configuration.
    """
    t_start = time.perf_counter()
    started_at = _dt.datetime.now(_dt.timezone.utc).isoformat()

    settings = load_config(config_path, overrides)
    config_path = Path(config_path)
    data_path = Path(data_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    categories = parse_categories(settings.categories_path)
    records, problems = scan_records(data_path, categories)
    if problems:
        report = _problem_report(data_path, problems)
        report_path = out_dir / "errors.json"
        report_path.write_text(json.dumps(report, indent=2, sort_keys=True)
                               + "\n", encoding="utf-8")
        raise ValidationFailure(report, report_path)
    if not records:
        raise ConfigError(f"no records in {data_path}")

    cat_index = {c: i for i, c in enumerate(categories)}
    spreads, skipped = spread_records(records, settings.window, cat_index)
    del spreads
    if skipped:
        logger.warning("%d record(s) dated wholly outside the window were "
                       "skipped", len(skipped))
    skipped_keys = {r.key for r in skipped}
    accepted = [r for r in records if r.key not in skipped_keys]
    if not accepted:
        raise ConfigError("every record lies outside the study window")

    run_config = settings.build_run_config(
        categories, [r.project for r in accepted])

    logger.info("replaying %d records x %d permutations (%s kernel, "
                "%d worker(s))", len(accepted), settings.permutations,
                active_backend(), workers)
    table = run_all(accepted, run_config, workers=workers)

    manifest = _build_manifest(settings, config_path, data_path, categories,
                               records, skipped, table)
    digest = manifest["manifest_digest"]

    _write_sample_artifacts(out_dir, digest, table, compact)
    summaries = _write_summaries(out_dir, digest, settings, table,
                                 dump_densities)
    _warn_empty_comparisons(run_config.comparisons, table)

    if skipped:
        _write_csv(
            out_dir / "skips.csv", digest, "key,project,date_start,date_end",
            (f"{r.key},{r.project},{r.date_start},{r.date_end}\n"
             for r in skipped),
        )

    if timestamp:
        manifest["wall_clock"] = {
            "started_at": started_at,
            "elapsed_seconds": round(time.perf_counter() - t_start, 3),
        }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")

    logger.info("wrote %d phi samples, %d group summaries to %s",
                len(table), len(summaries), out_dir)
    return manifest


def _build_manifest(settings: PipelineSettings, config_path, data_path,
                    categories, records, skipped, table: PhiTable) -> dict:
    per_project = Counter(r.project for r in records)
    per_project_skipped = Counter(r.project for r in skipped)
    core = {
        "tool": {"name": "urndist", "version": __version__},
        "config": settings.echo(),
        "inputs": {
            "config": {"path": str(config_path),
                       "sha256": _sha256_file(config_path)},
            "data": {"path": str(data_path),
                     "sha256": _sha256_file(data_path)},
            "categories": {"path": str(settings.categories_path),
                           "sha256": _sha256_file(settings.categories_path)},
        },
        "categories": list(categories),
        "records": {
            "total": len(records),
            "accepted": len(records) - len(skipped),
            "skipped_outside_window": len(skipped),
            "per_project": {p: per_project[p] for p in sorted(per_project)},
            "per_project_skipped": {p: per_project_skipped[p]
                                    for p in sorted(per_project_skipped)},
        },
        "run": {
            "draw_events": table.draw_events,
            "phi_samples": len(table),
            "groups": sum(1 for _ in table.groups()),
        },
    }
    canonical = json.dumps(core, sort_keys=True, separators=(",", ":"))
    core["manifest_digest"] = hashlib.sha256(canonical.encode()).hexdigest()
    return core


def _write_sample_artifacts(out_dir: Path, digest: str, table: PhiTable,
                            compact: bool) -> None:
    labels = [_comparison_label(pair) for pair in table.comparisons]
    if compact:
        label_of = dict(zip(table.comparisons, labels))
        _write_csv(
            out_dir / "phi_groups.csv", digest, "comparison,interval,n",
            (f"{label_of[pair]},{j},{len(values)}\n"
             for pair, j, values in table.groups()),
        )
        return

    comp = table.comparison_idx
    _write_csv(
        out_dir / "phi_samples.csv", digest,
        "comparison,interval,permutation,draw_index,phi",
        (f"{labels[comp[i]]},{table.interval[i]},{table.permutation[i]},"
         f"{table.draw_index[i]},{_fmt(table.phi[i])}\n"
         for i in range(len(table))),
    )

    traj_dir = out_dir / "trajectories"
    traj_dir.mkdir(exist_ok=True)
    bounds = [0] + list((comp[1:] != comp[:-1]).nonzero()[0] + 1) + [len(table)]
    seen = set()
    for a, b in zip(bounds[:-1], bounds[1:]):
        c = int(comp[a])
        seen.add(c)
        _write_csv(
            traj_dir / f"{labels[c]}.csv", digest,
            "interval,permutation,draw_index,phi",
            (f"{table.interval[i]},{table.permutation[i]},"
             f"{table.draw_index[i]},{_fmt(table.phi[i])}\n"
             for i in range(a, b)),
        )
    for c, label in enumerate(labels):
        if c not in seen:  # comparison produced no samples: empty file
            _write_csv(traj_dir / f"{label}.csv", digest,
                       "interval,permutation,draw_index,phi", ())


def _write_summaries(out_dir: Path, digest: str, settings: PipelineSettings,
                     table: PhiTable, dump_densities: bool) -> list:
    if settings.metric is Metric.HELLINGER:
        support = (0.0, SQRT2)
    else:
        top = max((float(v.max()) for _, _, v in table.groups()),
                  default=0.0)
        support = (0.0, max(1.05 * top, 1e-6))

    summaries = []
    for pair, j, values in table.groups():
        if len(values) < 2:
            logger.warning("group %s interval %d has %d sample(s); no "
                           "density summary", _comparison_label(pair), j,
                           len(values))
            continue
        summary = summarize(values, grid_size=settings.grid_size,
                            hpd_level=settings.hpd_level,
                            bandwidth=settings.bandwidth, support=support)
        summaries.append((pair, j, summary))

    max_pairs = max((len(s.hpd_region) for _, _, s in summaries), default=1)
    header = "comparison,interval,n,mode" + "".join(
        f",hpd_lo_{i+1},hpd_hi_{i+1}" for i in range(max_pairs))
    lines = []
    for pair, j, s in summaries:
        cells = [_comparison_label(pair), str(j), str(s.sample_count),
                 _fmt(s.mode)]
        for lo, hi in s.hpd_region:
            cells.extend((_fmt(lo), _fmt(hi)))
        cells.extend([""] * (2 * (max_pairs - len(s.hpd_region))))
        lines.append(",".join(cells) + "\n")
    _write_csv(out_dir / "summary.csv", digest, header, lines)

    _write_csv(
        out_dir / "endpoints.csv", digest, "comparison,interval,n,final_phi",
        (f"{_comparison_label(pair)},{j},{n},{_fmt(phi)}\n"
         for pair, j, n, phi in table.endpoints()),
    )

    if dump_densities:
        dens_dir = out_dir / "densities"
        dens_dir.mkdir(exist_ok=True)
        width = len(str(max(1, table.interval_count - 1)))
        for pair, j, s in summaries:
            name = f"{_comparison_label(pair)}__j{j:0{width}d}.csv"
            _write_csv(
                dens_dir / name, digest, "x,density",
                (f"{_fmt(x)},{_fmt(d)}\n"
                 for x, d in zip(s.grid, s.density)),
            )
    return summaries


def _warn_empty_comparisons(comparisons, table: PhiTable) -> None:
    populated = {table.comparisons[int(c)]
                 for c in set(table.comparison_idx.tolist())}
    for pair in comparisons:
        if pair not in populated:
            logger.warning("comparison %s produced no samples (no interval "
                           "ever had mass on both sides)",
                           _comparison_label(pair))
