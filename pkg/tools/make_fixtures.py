#!/usr/bin/env python3
"""Regenerate the bundled fixtures under src/urndist/fixtures/.

Two fixtures ship with the package:

* urn/ — the three-urn worked example: 3 single-project scopes, one
  interval, 10 draws per urn interleaved in file order so the urns advance
  in lockstep under the identity ordering.

* synthetic/ — a 3-region, 22-interval dataset in two parameterizations
  (form-like, 5 categories, 4602 records; ware-like, 4 categories, 4865
  records) sampled from known per-interval category frequencies.  Every
  record's date range sits inside one decade, so the generating frequencies
  are exact per-interval truth.  The frequencies, the realized per-interval
  mass per region, and the realized pooled frequencies are stored in
  truth_*.json for oracle tests.

Deterministic: fixed seeds, stable ordering.  Run from the repo root:

    python tools/make_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "src" / "urndist" / "fixtures"

REGIONS = {
    "etr": ["etr01", "etr02", "etr03", "etr04", "etr05"],
    "lat": ["lat01", "lat02", "lat03", "lat04", "lat05"],
    "apu": ["apu01", "apu02", "apu03", "apu04"],
}
PROJECTS = [p for members in REGIONS.values() for p in members]
REGION_OF = {p: r for r, members in REGIONS.items() for p in members}

WINDOW_START, WINDOW_END, DECADE = -200, 20, 10
J = (WINDOW_END - WINDOW_START) // DECADE


def write_urn_fixture() -> None:
    u1 = "R G R R B R G G G R".split()
    u2 = "B G R R R R R G G G".split()
    u3 = "B B R G B R R B G R".split()
    color = {"R": "red", "G": "green", "B": "blue"}

    d = FIXTURES / "urn"
    d.mkdir(parents=True, exist_ok=True)
    (d / "categories.txt").write_text("red\ngreen\nblue\n")

    lines = ["key,project,region,category,count,date_start,date_end"]
    for t in range(10):
        for urn, seq in (("u1", u1), ("u2", u2), ("u3", u3)):
            lines.append(
                f"{urn}-{t+1:02d},{urn},urns,{color[seq[t]]},1,-200,-191")
    (d / "records.csv").write_text("\n".join(lines) + "\n")

    (d / "config.toml").write_text('''[run]
seed = 20260810
permutations = 40
alpha0 = 0.0
mode = "unweighted"
metric = "hellinger"

[window]
start_year = -200
end_year = -190
interval_length = 10

[data]
categories = "categories.txt"

[density]
hpd_level = 0.9
grid_size = 512

[scopes]
urn1 = ["u1"]
urn2 = ["u2"]
urn3 = ["u3"]

[comparisons]
pairs = [["urn1", "urn3"], ["urn2", "urn3"], ["urn1", "urn2"]]
''')
    print(f"urn fixture: 30 records -> {d}")


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = np.exp(logits - logits.max())
    return z / z.sum()


def _frequencies(base: dict[str, list[float]], trend: dict[str, list[float]],
                 K: int) -> dict[str, np.ndarray]:
    """Per-region J x K frequency tables drifting smoothly over time."""
    freqs = {}
    for region in REGIONS:
        b = np.asarray(base[region])
        t = np.asarray(trend[region])
        rows = [_softmax(b + t * (j / (J - 1))) for j in range(J)]
        freqs[region] = np.asarray(rows)
    return freqs


def _allocate_records(masses: np.ndarray, r_cell: int) -> list[int]:
    """Number of records per category for one cell: proportional to mass,
    at least 1 for any category with mass, never more than the mass (every
    record needs a count >= 1), summing exactly to ``r_cell``."""
    total = int(masses.sum())
    quota = r_cell * masses / total
    n = np.minimum(np.maximum(np.floor(quota), (masses >= 1)), masses)
    n = n.astype(int)
    while n.sum() < r_cell:
        room = (n < masses)
        k = int(np.argmax(np.where(room, quota - n, -np.inf)))
        n[k] += 1
    while n.sum() > r_cell:
        shrinkable = (n > 1) | ((n == 1) & (masses == 0))
        k = int(np.argmin(np.where(shrinkable, quota - n, np.inf)))
        n[k] -= 1
    return n.tolist()


def write_synthetic_parameterization(tag: str, categories: list[str],
                                     n_records: int, base, trend,
                                     seed: int, run_seed: int) -> None:
    K = len(categories)
    freqs = _frequencies(base, trend, K)
    rng = np.random.default_rng(seed)

    d = FIXTURES / "synthetic"
    d.mkdir(parents=True, exist_ok=True)
    (d / f"categories_{tag}.txt").write_text(
        "\n".join(categories) + "\n")

    # spread the pinned record total over (project, interval) cells
    cells = [(p, j) for j in range(J) for p in PROJECTS]
    records_per_cell = {cell: n_records // len(cells) for cell in cells}
    for i in range(n_records % len(cells)):
        records_per_cell[cells[i]] += 1

    # Category assignment happens at the sherd level (cell mass drawn
    # multinomially from the design frequencies), then sherds are packed
    # into single-category records.  The realized per-interval frequencies
    # are therefore multinomial around the design truth with the full sherd
    # mass as sample size.
    lines = ["key,project,region,category,count,date_start,date_end"]
    mass = {r: np.zeros(J) for r in REGIONS}
    cat_mass = {r: np.zeros((J, K)) for r in REGIONS}
    key_no = 0
    for project, j in cells:
        region = REGION_OF[project]
        r_cell = records_per_cell[(project, j)]
        if r_cell == 0:
            continue
        cell_mass = int((1 + rng.poisson(23, size=r_cell)).sum())
        masses = rng.multinomial(cell_mass, freqs[region][j])
        per_cat_records = _allocate_records(masses, r_cell)
        cell_records = []
        for k in range(K):
            n_k, m_k = per_cat_records[k], int(masses[k])
            if n_k == 0:
                continue
            bases = [m_k // n_k] * n_k
            for extra in range(m_k % n_k):
                bases[extra] += 1
            cell_records.extend((k, c) for c in bases)
        rng.shuffle(cell_records)
        lo = WINDOW_START + j * DECADE
        for k, count in cell_records:
            key_no += 1
            a = int(rng.integers(0, DECADE))
            b = int(rng.integers(a, DECADE))
            lines.append(f"{tag[0]}{key_no:05d},{project},{region},"
                         f"{categories[k]},{count},{lo + a},{lo + b}")
        mass[region][j] += cell_mass
        cat_mass[region][j] += masses
    assert key_no == n_records
    (d / f"records_{tag}.csv").write_text("\n".join(lines) + "\n")

    # pooled truth: mixture of the design frequencies with realized
    # per-interval region masses as weights
    total = sum(mass.values())
    pooled = sum(mass[r][:, None] * freqs[r] for r in REGIONS) / total[:, None]

    truth = {
        "parameterization": tag,
        "categories": categories,
        "interval_count": J,
        "record_count": n_records,
        "regions": {
            r: {
                "projects": REGIONS[r],
                "frequencies": freqs[r].tolist(),
                "realized_mass": mass[r].tolist(),
                "realized_frequencies":
                    (cat_mass[r] / mass[r][:, None]).tolist(),
            }
            for r in REGIONS
        },
        "pooled_frequencies": pooled.tolist(),
    }
    (d / f"truth_{tag}.json").write_text(
        json.dumps(truth, indent=2, sort_keys=True) + "\n")

    scopes = "\n".join(f'{r} = {json.dumps(members)}'
                       for r, members in REGIONS.items())
    (d / f"config_{tag}.toml").write_text(f'''[run]
seed = {run_seed}
permutations = 40
alpha0 = 1.0
mode = "unweighted"
metric = "hellinger"

[window]
start_year = {WINDOW_START}
end_year = {WINDOW_END}
interval_length = {DECADE}

[data]
categories = "categories_{tag}.txt"

[density]
hpd_level = 0.9
grid_size = 512

[scopes]
{scopes}
ita = "*"

[comparisons]
pairs = [
    ["etr", "ita"], ["lat", "ita"], ["apu", "ita"],
    ["etr", "lat"], ["etr", "apu"], ["lat", "apu"],
]
''')
    total_count = int(sum(m.sum() for m in mass.values()))
    print(f"synthetic {tag}: {n_records} records, total count {total_count}, "
          f"min region-interval mass "
          f"{min(float(m.min()) for m in mass.values()):.0f}")


def main() -> None:
    write_urn_fixture()
    write_synthetic_parameterization(
        tag="form",
        categories=["amphora", "bowl", "plate", "jar", "cookpot"],
        n_records=4602,
        base={
            "etr": [1.2, 0.6, 0.3, 0.0, -0.4],
            "lat": [0.3, 1.1, 0.2, 0.5, -0.6],
            "apu": [0.1, 0.1, 1.0, -0.3, 0.6],
        },
        trend={
            "etr": [-0.5, 0.4, 0.2, 0.0, 0.3],
            "lat": [0.4, -0.6, 0.3, 0.1, 0.2],
            "apu": [0.3, 0.5, -0.7, 0.2, -0.2],
        },
        seed=10,
        run_seed=41521,
    )
    write_synthetic_parameterization(
        tag="ware",
        categories=["coarse", "fine", "gloss", "glass"],
        n_records=4865,
        base={
            "etr": [1.0, 0.4, 0.1, -0.8],
            "lat": [0.4, 0.9, 0.3, -1.0],
            "apu": [0.7, -0.2, 0.8, -0.9],
        },
        trend={
            "etr": [-0.4, 0.5, 0.1, 0.4],
            "lat": [0.3, -0.4, 0.4, 0.2],
            "apu": [-0.2, 0.6, -0.4, 0.5],
        },
        seed=34,
        run_seed=90125,
    )


if __name__ == "__main__":
    main()
