"""Comparison-scope probability vectors built from posterior states.

Two aggregation modes:

* unweighted: one pooled state accumulates all member contexts' draws and
  the scope vector is simply its posterior mean.  A data-rich member then
  dominates the pool.
* weighted: every member context keeps its own state and the scope vector is
  the (by default equal-weight) average of the member posterior means, which
  neutralizes fieldwork-intensity imbalance.  All members contribute from
  draw 0, so members without data yet supply their prior mean; this requires
  a positive prior concentration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .posterior import PosteriorState


@dataclass(frozen=True)
class ScopeDefinition:
    """A named comparison scope: a label plus its member context ids."""

    scope_id: str
    member_projects: tuple[str, ...]

    def __post_init__(self):
        if not self.member_projects:
            raise ConfigError(f"scope {self.scope_id!r} has no member projects")
        if len(set(self.member_projects)) != len(self.member_projects):
            raise ConfigError(f"scope {self.scope_id!r} lists a member twice")


def scope_mean_unweighted(pool_state: PosteriorState, j: int) -> np.ndarray:
    """Scope vector of a pooled state: its posterior mean at interval ``j``.

    The pool must have accumulated exactly the member contexts' spreads;
    that bookkeeping is the caller's (the permutation engine's) job.
    """
    return pool_state.posterior_mean(j)


def scope_mean_weighted(
    states: Sequence[PosteriorState],
    j: int,
    weights: Sequence[float] | None = None,
) -> np.ndarray:
    """Weighted scope vector: average of the member posterior means.

    ``weights`` defaults to 1/D each; alternative criteria (per-capita and
    the like) can be passed but only uniform weights are exercised by the
    pipeline.  With a zero prior concentration any member empty at ``j``
    raises :class:`EmptyIntervalError`.
    """
    if not states:
        raise ConfigError("weighted scope mean needs at least one member state")
    K = states[0].K
    J = states[0].J
    for st in states[1:]:
        if st.K != K or st.J != J:
            raise ValueError("member states disagree on K or J")
    D = len(states)
    if weights is None:
        w = np.full(D, 1.0 / D)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (D,):
            raise ValueError(f"need {D} weights, got shape {w.shape}")
        if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-9:
            raise ValueError("weights must be non-negative and sum to 1")

    out = np.zeros(K)
    for wd, st in zip(w, states):
        out += wd * st.posterior_mean(j)
    return out
