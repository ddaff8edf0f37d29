"""Run configuration: a single TOML file.

Example::

    [run]
    seed = 20260810
    permutations = 40
    alpha0 = 1.0
    mode = "unweighted"        # or "weighted"
    metric = "hellinger"       # or "kl"

    [window]
    start_year = -200
    end_year = 20
    interval_length = 10

    [data]
    categories = "categories.txt"   # path, relative to this file

    [density]
    hpd_level = 0.9
    grid_size = 512
    # bandwidth = 0.02              # optional; default Silverman

    [scopes]
    etr = ["etr01", "etr02"]
    all = "*"                       # every project present in the data

    [comparisons]
    pairs = [["etr", "all"]]

CLI flags override ``[run]`` values and ``hpd_level``.  Scope labels are
restricted to ``[A-Za-z0-9_.-]`` (they become file names) and must not
contain ``_vs_``.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .engine import MASK64, RunConfig
from .errors import ConfigError
from .metrics import Metric
from .records import StudyWindow
from .scopes import ScopeDefinition

_LABEL_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")

_KNOWN_SECTIONS = {"run", "window", "data", "density", "scopes",
                   "comparisons"}
_KNOWN_KEYS = {
    "run": {"seed", "permutations", "alpha0", "mode", "metric"},
    "window": {"start_year", "end_year", "interval_length"},
    "data": {"categories"},
    "density": {"hpd_level", "grid_size", "bandwidth"},
    "comparisons": {"pairs"},
}

OVERRIDABLE = ("seed", "permutations", "alpha0", "mode", "metric",
               "hpd_level")


@dataclass(frozen=True)
class PipelineSettings:
    """Validated configuration, with CLI overrides already applied.

    ``scopes`` may still contain the ``"*"`` wildcard; it resolves to all
    projects present in the data once records are loaded.
    """

    seed: int
    permutations: int
    alpha0: float
    mode: str
    metric: Metric
    window: StudyWindow
    categories_path: Path
    hpd_level: float
    grid_size: int
    bandwidth: float | None
    scopes: tuple[tuple[str, tuple[str, ...] | str], ...]
    comparisons: tuple[tuple[str, str], ...]
    config_path: Path | None = field(default=None, compare=False)

    def echo(self) -> dict:
        """Effective configuration for the run manifest."""
        return {
            "seed": self.seed,
            "permutations": self.permutations,
            "alpha0": self.alpha0,
            "mode": self.mode,
            "metric": self.metric.value,
            "window": {
                "start_year": self.window.start_year,
                "end_year": self.window.end_year,
                "interval_length": self.window.interval_length,
                "interval_count": self.window.interval_count,
            },
            "density": {
                "hpd_level": self.hpd_level,
                "grid_size": self.grid_size,
                "bandwidth": self.bandwidth,
            },
            "scopes": {label: (members if isinstance(members, str)
                               else list(members))
                       for label, members in self.scopes},
            "comparisons": [list(pair) for pair in self.comparisons],
        }

    def build_run_config(self, categories: Sequence[str],
                         projects_in_data: Sequence[str]) -> RunConfig:
        """Resolve wildcards against the loaded data and build the engine
        configuration."""
        all_projects = tuple(sorted(set(projects_in_data)))
        scope_defs = []
        for label, members in self.scopes:
            if members == "*":
                if not all_projects:
                    raise ConfigError(
                        f"scope {label!r} is '*' but the data has no projects"
                    )
                members = all_projects
            scope_defs.append(ScopeDefinition(scope_id=label,
                                              member_projects=tuple(members)))
        return RunConfig(
            categories=tuple(categories),
            scopes=tuple(scope_defs),
            comparisons=self.comparisons,
            window=self.window,
            permutations=self.permutations,
            seed=self.seed,
            alpha0=self.alpha0,
            mode=self.mode,
            metric=self.metric,
        )


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _check_unknown(raw: Mapping, section: str):
    extra = set(raw) - _KNOWN_KEYS[section]
    _require(not extra,
             f"unknown keys in [{section}]: {', '.join(sorted(extra))}")


def load_config(path: str | Path,
                overrides: Mapping[str, object] | None = None) -> PipelineSettings:
    """Parse and validate a configuration file, applying CLI overrides."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from None

    unknown = set(raw) - _KNOWN_SECTIONS
    _require(not unknown,
             f"unknown config sections: {', '.join(sorted(unknown))}")

    run = dict(raw.get("run", {}))
    window = dict(raw.get("window", {}))
    data = dict(raw.get("data", {}))
    density = dict(raw.get("density", {}))
    comparisons_sec = dict(raw.get("comparisons", {}))
    for section, values in (("run", run), ("window", window),
                            ("data", data), ("density", density),
                            ("comparisons", comparisons_sec)):
        _check_unknown(values, section)

    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            _require(key in OVERRIDABLE, f"{key} is not overridable")
            if key == "hpd_level":
                density[key] = value
            else:
                run[key] = value

    _require("seed" in run, "[run] seed is required")
    seed = run["seed"]
    _require(isinstance(seed, int) and 0 <= seed <= MASK64,
             "[run] seed must be an unsigned 64-bit integer")

    permutations = run.get("permutations", 40)
    _require(isinstance(permutations, int) and permutations >= 1,
             "[run] permutations must be a positive integer")

    alpha0 = run.get("alpha0", 1.0)
    _require(isinstance(alpha0, (int, float)) and alpha0 >= 0,
             "[run] alpha0 must be a number >= 0")

    mode = run.get("mode", "unweighted")
    _require(mode in ("unweighted", "weighted"),
             f"[run] mode must be 'unweighted' or 'weighted', got {mode!r}")
    _require(not (mode == "weighted" and alpha0 == 0),
             "[run] weighted mode requires alpha0 > 0")

    try:
        metric = Metric(run.get("metric", "hellinger"))
    except ValueError:
        raise ConfigError(
            f"[run] metric must be 'hellinger' or 'kl', got {run['metric']!r}"
        ) from None

    for key in ("start_year", "end_year", "interval_length"):
        if key in window:
            _require(isinstance(window[key], int),
                     f"[window] {key} must be an integer")
    study_window = StudyWindow(
        start_year=window.get("start_year", -200),
        end_year=window.get("end_year", 20),
        interval_length=window.get("interval_length", 10),
    )

    _require("categories" in data, "[data] categories (file path) is required")
    categories_path = Path(data["categories"])
    if not categories_path.is_absolute():
        categories_path = path.parent / categories_path

    hpd_level = density.get("hpd_level", 0.90)
    _require(isinstance(hpd_level, (int, float)) and 0 < hpd_level < 1,
             "[density] hpd_level must be in (0, 1)")
    grid_size = density.get("grid_size", 512)
    _require(isinstance(grid_size, int) and grid_size >= 2,
             "[density] grid_size must be an integer >= 2")
    bandwidth = density.get("bandwidth")
    if bandwidth is not None:
        _require(isinstance(bandwidth, (int, float)) and bandwidth > 0,
                 "[density] bandwidth must be a positive number")
        bandwidth = float(bandwidth)

    scopes_raw = raw.get("scopes", {})
    _require(isinstance(scopes_raw, dict) and scopes_raw,
             "[scopes] must declare at least one scope")
    scopes = []
    for label, members in scopes_raw.items():
        _require(_LABEL_RE.match(label) is not None and "_vs_" not in label,
                 f"scope label {label!r} must match [A-Za-z0-9_.-] and not "
                 "contain '_vs_' (labels become file names)")
        if members == "*":
            scopes.append((label, "*"))
            continue
        _require(isinstance(members, list) and members
                 and all(isinstance(p, str) and p for p in members),
                 f"scope {label!r} must be '*' or a non-empty list of "
                 "project ids")
        scopes.append((label, tuple(members)))

    comparisons_raw = comparisons_sec.get("pairs", [])
    _require(isinstance(comparisons_raw, list) and comparisons_raw,
             "[comparisons] pairs must be a non-empty list of "
             "[left, right] pairs")
    labels = {label for label, _ in scopes}
    comparisons = []
    for pair in comparisons_raw:
        _require(isinstance(pair, list) and len(pair) == 2
                 and all(isinstance(s, str) for s in pair),
                 f"comparison {pair!r} must be a [left, right] pair")
        left, right = pair
        for side in pair:
            _require(side in labels,
                     f"comparison references undeclared scope {side!r}")
        comparisons.append((left, right))

    return PipelineSettings(
        seed=seed,
        permutations=permutations,
        alpha0=float(alpha0),
        mode=mode,
        metric=metric,
        window=study_window,
        categories_path=categories_path,
        hpd_level=float(hpd_level),
        grid_size=grid_size,
        bandwidth=bandwidth,
        scopes=tuple(scopes),
        comparisons=tuple(comparisons),
        config_path=path,
    )
