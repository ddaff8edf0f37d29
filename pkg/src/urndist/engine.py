"""Monte Carlo permutation engine.

Replays the record stream in R deterministically-shuffled orders.  Each draw
updates the posterior accumulators of every scope containing the drawn
record's context, then one distance value is recorded for every declared
comparison pair, for every interval the drawn record touches.

Shuffling
---------
Orders must reproduce bit-for-bit across platforms and releases, so the
generator is fixed here rather than delegated to a library:

* stream seed for permutation ``r``: ``mix64(seed + (r + 1) * GOLDEN)`` with
  GOLDEN = 0x9E3779B97F4A7C15 and ``mix64`` the splitmix64 finalizer;
* the stream is splitmix64 (state += GOLDEN, then mix64);
* the shuffle is a backward Fisher-Yates with ``j = next() % (i + 1)``
  (modulo bias is below 2**-40 for any realistic record count).

Changing the seed changes every shuffled order; endpoint values are
order-invariant and therefore seed-invariant.
"""

from __future__ import annotations

import concurrent.futures as _futures
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from .errors import ConfigError
from .metrics import Metric
from .records import FindRecord, StudyWindow, map_to_intervals
from .scopes import ScopeDefinition

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

MODES = ("unweighted", "weighted")


def mix64(z: int) -> int:
    """splitmix64 finalizer: a fixed 64-bit mixing rule."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Deterministic 64-bit generator with a one-word state."""

    __slots__ = ("_state",)

    def __init__(self, state: int):
        self._state = state & MASK64

    def next(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)


def permute_indices(n: int, seed: int, r: int) -> np.ndarray:
    """Shuffled index order for permutation ``r`` of a run seeded ``seed``."""
    rng = SplitMix64(mix64((seed + (r + 1) * GOLDEN) & MASK64))
    order = np.arange(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        j = rng.next() % (i + 1)
        order[i], order[j] = order[j], order[i]
    return order


@dataclass(frozen=True)
class RunConfig:
    """Everything the engine needs to replay a record set."""

    categories: tuple[str, ...]
    scopes: tuple[ScopeDefinition, ...]
    comparisons: tuple[tuple[str, str], ...]
    window: StudyWindow = field(default_factory=StudyWindow)
    permutations: int = 40
    seed: int = 0
    alpha0: float = 1.0
    mode: str = "unweighted"
    metric: Metric = Metric.HELLINGER

    def __post_init__(self):
        if len(self.categories) < 2:
            raise ConfigError("need at least 2 categories")
        if len(set(self.categories)) != len(self.categories):
            raise ConfigError("category labels must be unique")
        if self.permutations < 1:
            raise ConfigError("permutations must be >= 1")
        if not (0 <= self.seed <= MASK64):
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not (self.alpha0 >= 0):
            raise ConfigError(f"alpha0 must be >= 0, got {self.alpha0}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "weighted" and self.alpha0 == 0:
            raise ConfigError(
                "weighted mode requires alpha0 > 0: members without data "
                "contribute their prior mean, which is undefined at alpha0=0"
            )
        if not self.scopes:
            raise ConfigError("no scopes declared")
        ids = [s.scope_id for s in self.scopes]
        if len(set(ids)) != len(ids):
            raise ConfigError("scope ids must be unique")
        if not self.comparisons:
            raise ConfigError("no comparisons declared")
        known = set(ids)
        seen_pairs = set()
        for pair in self.comparisons:
            left, right = pair
            for side in pair:
                if side not in known:
                    raise ConfigError(
                        f"comparison references undeclared scope {side!r}"
                    )
            if pair in seen_pairs:
                raise ConfigError(f"duplicate comparison {left!r} vs {right!r}")
            seen_pairs.add(pair)
        Metric(self.metric)


@dataclass(frozen=True, slots=True)
class PhiSample:
    """One recorded distance value."""

    comparison: tuple[str, str]
    interval: int
    permutation: int
    draw_index: int  # 1-based position in the permuted record stream
    value: float


class ReplayProblem:
    """Flattened, kernel-ready arrays shared by all permutations of a run.

    Records must all overlap the study window; pre-filter with
    :func:`urndist.records.spread_records` and report skips upstream.
    """

    def __init__(self, records: Sequence[FindRecord], config: RunConfig):
        if not records:
            raise ConfigError("no records to replay")
        self.config = config
        window = config.window
        cat_index = {c: i for i, c in enumerate(config.categories)}
        self.n_records = len(records)
        self.K = len(config.categories)
        self.J = window.interval_count

        cat = np.empty(self.n_records, dtype=np.int32)
        j0 = np.empty(self.n_records, dtype=np.int32)
        j1 = np.empty(self.n_records, dtype=np.int32)
        val = np.empty(self.n_records, dtype=np.float64)
        projects: list[str] = []
        for i, rec in enumerate(records):
            sp = map_to_intervals(rec, window, cat_index)  # may raise
            cat[i] = sp.category_index
            j0[i] = sp.first_interval
            j1[i] = sp.last_interval
            val[i] = sp.value
            projects.append(rec.project)
        self.rec_cat, self.rec_j0, self.rec_j1, self.rec_val = cat, j0, j1, val

        # Units: posterior accumulators. One per scope when pooling
        # (unweighted); one per member context when averaging (weighted).
        scope_ids = [s.scope_id for s in config.scopes]
        if config.mode == "unweighted":
            unit_of_scope = {sid: u for u, sid in enumerate(scope_ids)}
            self.n_units = len(scope_ids)
            member_sets = [set(s.member_projects) for s in config.scopes]

            def units_for_project(p):
                return [u for u, members in enumerate(member_sets)
                        if p in members]

            def side_units_for(scope_id):
                return [unit_of_scope[scope_id]]
        else:
            unit_of_project: dict[str, int] = {}
            for s in config.scopes:
                for p in s.member_projects:
                    if p not in unit_of_project:
                        unit_of_project[p] = len(unit_of_project)
            self.n_units = len(unit_of_project)

            def units_for_project(p):
                u = unit_of_project.get(p)
                return [] if u is None else [u]

            scope_by_id = {s.scope_id: s for s in config.scopes}

            def side_units_for(scope_id):
                return [unit_of_project[p]
                        for p in scope_by_id[scope_id].member_projects]

        rec_unit_off = np.zeros(self.n_records + 1, dtype=np.int32)
        rec_units: list[int] = []
        proj_units_cache: dict[str, list[int]] = {}
        for i, p in enumerate(projects):
            units = proj_units_cache.setdefault(p, units_for_project(p))
            rec_units.extend(units)
            rec_unit_off[i + 1] = len(rec_units)
        self.rec_unit_off = rec_unit_off
        self.rec_units = np.asarray(rec_units, dtype=np.int32)

        side_off = [0]
        side_units: list[int] = []
        for left, right in config.comparisons:
            for sid in (left, right):
                side_units.extend(side_units_for(sid))
                side_off.append(len(side_units))
        self.side_off = np.asarray(side_off, dtype=np.int32)
        self.side_units = np.asarray(side_units, dtype=np.int32)

        spans = (self.rec_j1 - self.rec_j0 + 1).astype(np.int64)
        self.max_samples = int(spans.sum()) * len(config.comparisons)

    def replay(self, order: np.ndarray, kernel=None):
        """Run one ordered replay; returns trimmed output arrays."""
        if kernel is None:
            kernel = kernels.get_kernel()
        out_comp = np.empty(self.max_samples, dtype=np.int32)
        out_interval = np.empty(self.max_samples, dtype=np.int32)
        out_draw = np.empty(self.max_samples, dtype=np.int32)
        out_phi = np.empty(self.max_samples, dtype=np.float64)
        metric_id = (kernels.METRIC_HELLINGER
                     if Metric(self.config.metric) is Metric.HELLINGER
                     else kernels.METRIC_KL)
        m = kernel.replay(
            order, self.rec_cat, self.rec_j0, self.rec_j1, self.rec_val,
            self.rec_unit_off, self.rec_units, self.side_off, self.side_units,
            self.n_units, self.J, self.K, self.config.alpha0, metric_id,
            out_comp, out_interval, out_draw, out_phi,
        )
        return (out_comp[:m].copy(), out_interval[:m].copy(),
                out_draw[:m].copy(), out_phi[:m].copy())


@dataclass
class PhiTable:
    """Pooled distance samples of a whole run, canonically ordered by
    (comparison, interval, permutation, draw_index)."""

    comparisons: tuple[tuple[str, str], ...]
    interval_count: int
    comparison_idx: np.ndarray
    interval: np.ndarray
    permutation: np.ndarray
    draw_index: np.ndarray
    phi: np.ndarray
    n_records: int
    permutations: int
    seed: int

    def __len__(self):
        return len(self.phi)

    @property
    def draw_events(self) -> int:
        """Total Monte Carlo draw events: records x permutations."""
        return self.n_records * self.permutations

    def groups(self) -> Iterator[tuple[tuple[str, str], int, np.ndarray]]:
        """Yield ``(comparison, interval, phi_values)`` per populated group,
        in canonical order.  Slices are views into the pooled table."""
        if len(self.phi) == 0:
            return
        key = (self.comparison_idx.astype(np.int64) * self.interval_count
               + self.interval)
        bounds = np.flatnonzero(np.diff(key)) + 1
        starts = np.concatenate(([0], bounds))
        ends = np.concatenate((bounds, [len(key)]))
        for a, b in zip(starts, ends):
            c = int(self.comparison_idx[a])
            yield self.comparisons[c], int(self.interval[a]), self.phi[a:b]

    def endpoints(self) -> list[tuple[tuple[str, str], int, int, float]]:
        """Final-draw value per group: ``(comparison, interval, n, phi)``.

        The last sample of a group within any permutation carries the
        full-data distance, which is permutation-invariant; canonical
        ordering makes it the last row of the group.
        """
        out = []
        if len(self.phi) == 0:
            return out
        key = (self.comparison_idx.astype(np.int64) * self.interval_count
               + self.interval)
        bounds = np.flatnonzero(np.diff(key)) + 1
        starts = np.concatenate(([0], bounds))
        ends = np.concatenate((bounds, [len(key)]))
        for a, b in zip(starts, ends):
            c = int(self.comparison_idx[a])
            out.append((self.comparisons[c], int(self.interval[a]),
                        int(b - a), float(self.phi[b - 1])))
        return out


def _samples_from_arrays(config, r, arrays) -> Iterator[PhiSample]:
    comp, interval, draw, phi = arrays
    for c, j, t, v in zip(comp, interval, draw, phi):
        yield PhiSample(comparison=config.comparisons[int(c)],
                        interval=int(j), permutation=r,
                        draw_index=int(t), value=float(v))


def run_ordered(records: Sequence[FindRecord], order: Iterable[int] | None,
                config: RunConfig, permutation: int = 0) -> Iterator[PhiSample]:
    """Replay an explicit record order (default: file order) and yield the
    samples.  Mostly useful for diagnostics and oracle tests."""
    problem = ReplayProblem(records, config)
    if order is None:
        order = np.arange(problem.n_records, dtype=np.int64)
    else:
        order = np.asarray(list(order), dtype=np.int64)
        if sorted(order.tolist()) != list(range(problem.n_records)):
            raise ConfigError("order must be a permutation of record indices")
    arrays = problem.replay(order)
    return _samples_from_arrays(config, permutation, arrays)


def run_permutation(records: Sequence[FindRecord], r: int,
                    config: RunConfig) -> Iterator[PhiSample]:
    """Replay permutation ``r`` (deterministically shuffled) and yield the
    samples in emission order (draw index strictly increasing per group)."""
    if r < 0 or r >= config.permutations:
        raise ConfigError(f"permutation index {r} not in [0, "
                          f"{config.permutations})")
    problem = ReplayProblem(records, config)
    order = permute_indices(problem.n_records, config.seed, r)
    arrays = problem.replay(order)
    return _samples_from_arrays(config, r, arrays)


# Worker-side state for process pools: the problem is shipped once per
# worker through the initializer, not once per task.
_WORKER_PROBLEM: ReplayProblem | None = None


def _init_worker(problem: ReplayProblem):
    global _WORKER_PROBLEM
    _WORKER_PROBLEM = problem


def _replay_task(r: int):
    problem = _WORKER_PROBLEM
    order = permute_indices(problem.n_records, problem.config.seed, r)
    return r, problem.replay(order)


def run_all(records: Sequence[FindRecord], config: RunConfig,
            workers: int = 1) -> PhiTable:
    """Run all R permutations and pool the samples.

    Permutations are independent (each replay owns private accumulators), so
    they may run in parallel; results are merged in permutation order and
    the output is identical at any worker count.
    """
    problem = ReplayProblem(records, config)
    R = config.permutations
    if workers > 1 and R > 1:
        results: list = [None] * R
        with _futures.ProcessPoolExecutor(
            max_workers=min(workers, R),
            initializer=_init_worker, initargs=(problem,),
        ) as pool:
            for r, arrays in pool.map(_replay_task, range(R)):
                results[r] = arrays
    else:
        results = []
        for r in range(R):
            order = permute_indices(problem.n_records, config.seed, r)
            results.append(problem.replay(order))

    comp = np.concatenate([a[0] for a in results])
    interval = np.concatenate([a[1] for a in results])
    draw = np.concatenate([a[2] for a in results])
    phi = np.concatenate([a[3] for a in results])
    perm = np.concatenate([np.full(len(a[0]), r, dtype=np.int32)
                           for r, a in enumerate(results)])

    idx = np.lexsort((draw, perm, interval, comp))
    return PhiTable(
        comparisons=config.comparisons,
        interval_count=problem.J,
        comparison_idx=comp[idx],
        interval=interval[idx],
        permutation=perm[idx],
        draw_index=draw[idx],
        phi=phi[idx],
        n_records=problem.n_records,
        permutations=R,
        seed=config.seed,
    )
