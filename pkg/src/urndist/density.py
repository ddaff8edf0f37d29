"""Kernel density estimate, mode point-estimate, and HPD credible region
for a pooled sample of distance values.

Conventions (all configuration-exposed):

* Gaussian kernel on a fixed grid of G evenly spaced abscissae spanning the
  metric's support, [0, sqrt(2)] for Hellinger;
* Silverman bandwidth 0.9 * min(sd, IQR/1.34) * n**(-1/5);
* mass leaking past a support boundary is reflected back across it, then the
  density is renormalized on the grid (trapezoid rule);
* the mode is the smallest grid abscissa attaining the maximum density;
* the HPD region is the water-level construction: the largest density
  threshold whose super-level set holds at least the requested mass, returned
  as maximal runs of grid cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InsufficientDataError

SQRT2 = math.sqrt(2.0)

DEFAULT_GRID_SIZE = 512
DEFAULT_HPD_LEVEL = 0.90

_SUPPORT_SLACK = 1e-9


@dataclass(frozen=True)
class DensitySummary:
    """KDE grid, mode and (optionally) HPD region for one sample pool."""

    grid: np.ndarray
    density: np.ndarray
    mode: float
    sample_count: int
    bandwidth: float
    degenerate: bool
    hpd_level: float | None = None
    hpd_region: tuple[tuple[float, float], ...] | None = None


def silverman_bandwidth(samples: np.ndarray) -> float:
    """0.9 * min(sd, IQR/1.34) * n**(-1/5).

    Falls back to the sd alone when the IQR is zero but the sample still has
    spread (heavily tied samples); returns 0 for a zero-variance sample.
    """
    n = len(samples)
    sd = float(np.std(samples))
    if sd == 0.0:
        return 0.0
    q75, q25 = np.percentile(samples, [75, 25])
    a = min(sd, (q75 - q25) / 1.34)
    if a == 0.0:
        a = sd
    return 0.9 * a * n ** (-0.2)


def _trapezoid(y: np.ndarray, dx: float) -> float:
    return float((y[:-1] + y[1:]).sum() * 0.5 * dx)


def kde(samples, grid_size: int = DEFAULT_GRID_SIZE,
        bandwidth: float | None = None,
        support: tuple[float, float] = (0.0, SQRT2)) -> DensitySummary:
    """Gaussian KDE of ``samples`` on a fixed grid over ``support``.

    A zero-variance sample yields the degenerate result: all mass in the
    grid cell nearest the common value.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise InsufficientDataError(
            f"need at least 2 samples for a density estimate, got {x.size}"
        )
    lo, hi = support
    if not hi > lo:
        raise ValueError(f"empty support {support}")
    if float(x.min()) < lo - _SUPPORT_SLACK or float(x.max()) > hi + _SUPPORT_SLACK:
        raise ValueError(
            f"samples outside the support [{lo}, {hi}]: "
            f"range [{x.min()}, {x.max()}]"
        )
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")

    grid = np.linspace(lo, hi, grid_size)
    dx = (hi - lo) / (grid_size - 1)

    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    if h <= 0.0:
        # degenerate: a point mass at the grid cell nearest the sample value
        density = np.zeros(grid_size)
        cell = int(np.argmin(np.abs(grid - float(x[0]))))
        # trapezoid mass of an isolated spike is d*dx interior, d*dx/2 at
        # the edges
        density[cell] = (2.0 / dx) if cell in (0, grid_size - 1) else 1.0 / dx
        return DensitySummary(grid=grid, density=density,
                              mode=float(grid[cell]), sample_count=len(x),
                              bandwidth=0.0, degenerate=True)

    density = np.zeros(grid_size)
    norm = 1.0 / (len(x) * h * math.sqrt(2.0 * math.pi))
    # direct evaluation, chunked over samples; reflected images across both
    # boundaries fold escaping mass back into the support
    for start in range(0, len(x), 4096):
        block = x[start:start + 4096, None]
        for center in (block, 2.0 * lo - block, 2.0 * hi - block):
            z = (grid[None, :] - center) / h
            density += np.exp(-0.5 * z * z).sum(axis=0)
    density *= norm
    density /= _trapezoid(density, dx)

    mode = float(grid[int(np.argmax(density))])
    return DensitySummary(grid=grid, density=density, mode=mode,
                          sample_count=len(x), bandwidth=h, degenerate=False)


def mode_estimate(summary: DensitySummary) -> float:
    """Smallest grid abscissa attaining the maximum density."""
    return float(summary.grid[int(np.argmax(summary.density))])


def hpd_region(summary: DensitySummary,
               level: float = DEFAULT_HPD_LEVEL) -> tuple[tuple[float, float], ...]:
    """Highest-posterior-density region at ``level``: the super-level set of
    the largest density threshold holding at least ``level`` trapezoid mass,
    as an ordered tuple of disjoint closed intervals.

    Always contains the mode.  For a degenerate density the region is the
    single zero-width interval at the mode.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    if summary.degenerate:
        return ((summary.mode, summary.mode),)

    density = summary.density
    dx = float(summary.grid[1] - summary.grid[0])
    seg_mass = (density[:-1] + density[1:]) * 0.5 * dx

    def mass_at(threshold: float) -> float:
        keep = density >= threshold
        return float(seg_mass[keep[:-1] & keep[1:]].sum())

    # mass_at is nonincreasing in the threshold: binary-search the unique
    # density values (descending) for the largest one still holding `level`.
    # The minimum density always qualifies (its super-level mass is 1).
    thresholds = np.unique(density)[::-1]
    lo_i, hi_i = 0, len(thresholds) - 1
    while lo_i < hi_i:
        mid = (lo_i + hi_i) // 2
        if mass_at(float(thresholds[mid])) >= level:
            hi_i = mid
        else:
            lo_i = mid + 1
    lam = float(thresholds[hi_i])

    keep = density >= lam
    edges = np.diff(keep.astype(np.int8))
    starts = np.flatnonzero(edges == 1) + 1
    ends = np.flatnonzero(edges == -1)
    if keep[0]:
        starts = np.concatenate(([0], starts))
    if keep[-1]:
        ends = np.concatenate((ends, [len(keep) - 1]))
    return tuple((float(summary.grid[a]), float(summary.grid[b]))
                 for a, b in zip(starts, ends))


def summarize(samples, grid_size: int = DEFAULT_GRID_SIZE,
              hpd_level: float = DEFAULT_HPD_LEVEL,
              bandwidth: float | None = None,
              support: tuple[float, float] = (0.0, SQRT2)) -> DensitySummary:
    """KDE + mode + HPD region in one call."""
    summary = kde(samples, grid_size=grid_size, bandwidth=bandwidth,
                  support=support)
    region = hpd_region(summary, hpd_level)
    return replace(summary, hpd_level=hpd_level, hpd_region=region)
