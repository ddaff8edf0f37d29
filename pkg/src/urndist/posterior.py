"""Dirichlet-categorical posterior bookkeeping for one scope.

Each scope (a single context, a pooled region, or the global pool) keeps a
J x K matrix of accumulated fractional counts, one row per time interval.
Observations arrive one record at a time as :class:`TemporalSpread` values;
conjugacy makes the posterior mean of interval ``j`` simply

    (alpha0 + c[j, i]) / (K * alpha0 + n[j])

where ``c`` is the accumulated matrix and ``n[j]`` its row sum.  With
``alpha0 = 0`` the mean degenerates to the empirical frequency and is
undefined until the interval has received mass.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, EmptyIntervalError
from .records import TemporalSpread


class PosteriorState:
    """Accumulated counts and prior concentration for one scope.

    Single-writer: concurrent updates of one state are not supported, but
    distinct states are fully independent.
    """

    __slots__ = ("scope_id", "K", "J", "alpha0", "accumulated",
                 "n_per_interval")

    def __init__(self, scope_id: str, K: int, J: int, alpha0: float = 1.0):
        if K < 2:
            raise ConfigError(f"need at least 2 categories, got K={K}")
        if J < 1:
            raise ConfigError(f"need at least 1 interval, got J={J}")
        if not (alpha0 >= 0):
            raise ConfigError(f"prior concentration must be >= 0, got {alpha0}")
        self.scope_id = scope_id
        self.K = K
        self.J = J
        self.alpha0 = float(alpha0)
        self.accumulated = np.zeros((J, K))
        self.n_per_interval = np.zeros(J)

    def update(self, spread: TemporalSpread) -> "PosteriorState":
        """Add one draw (one record's spread) to the accumulated counts.

        Returns self so call sites can chain; the update is in place.
        """
        if spread.category_index < 0 or spread.category_index >= self.K:
            raise ValueError(
                f"category index {spread.category_index} out of range for K={self.K}"
            )
        if spread.interval_count != self.J:
            raise ValueError(
                f"spread has {spread.interval_count} intervals, state has {self.J}"
            )
        j0, j1 = spread.first_interval, spread.last_interval
        self.accumulated[j0:j1 + 1, spread.category_index] += spread.value
        self.n_per_interval[j0:j1 + 1] += spread.value
        return self

    def posterior_mean(self, j: int) -> np.ndarray:
        """Posterior mean probability vector of interval ``j``.

        Raises :class:`EmptyIntervalError` when ``alpha0 == 0`` and the
        interval has received no mass; the caller decides whether to skip.
        """
        n_j = self.n_per_interval[j]
        if self.alpha0 == 0.0 and n_j == 0.0:
            raise EmptyIntervalError(self.scope_id, j)
        return (self.alpha0 + self.accumulated[j]) / (self.K * self.alpha0 + n_j)

    def copy(self) -> "PosteriorState":
        dup = PosteriorState(self.scope_id, self.K, self.J, self.alpha0)
        dup.accumulated = self.accumulated.copy()
        dup.n_per_interval = self.n_per_interval.copy()
        return dup

    def __repr__(self):
        return (f"PosteriorState({self.scope_id!r}, K={self.K}, J={self.J}, "
                f"alpha0={self.alpha0}, total={self.n_per_interval.sum():g})")


def new_state(scope_id: str, K: int, J: int, alpha0: float = 1.0) -> PosteriorState:
    """Construct an empty posterior state (all counts zero)."""
    return PosteriorState(scope_id, K, J, alpha0)
