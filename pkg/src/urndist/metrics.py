"""Distances between probability vectors.

Hellinger is the primary metric:

    H(p, q) = sqrt(2 * (1 - BC(p, q)))        BC(p, q) = sum_i sqrt(p_i q_i)

reported on the [0, sqrt(2)] scale (the square root, not the squared form).
Kullback-Leibler divergence is available as an optional diagnostic; it is
asymmetric and infinite when q has a zero component where p does not.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import InfiniteDivergenceError

SQRT2 = math.sqrt(2.0)

_NORMALIZATION_TOL = 1e-9


class Metric(str, enum.Enum):
    HELLINGER = "hellinger"
    KL = "kl"


def _checked_pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError(f"need two equal-length vectors, got shapes "
                         f"{p.shape} and {q.shape}")
    if p.size < 2:
        raise ValueError("probability vectors need at least 2 components")
    for name, v in (("p", p), ("q", q)):
        if np.any(v < 0):
            raise ValueError(f"{name} has negative components")
        total = float(v.sum())
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            raise ValueError(f"{name} sums to {total!r}, not 1")
    return p, q


def hellinger(p, q) -> float:
    """Hellinger distance in [0, sqrt(2)].

    Symmetric and zero exactly when p == q; sqrt(2) for disjoint support.
    The radicand is clamped at 0: BC can exceed 1 by ~1e-16 for identical
    inputs.
    """
    p, q = _checked_pair(p, q)
    bc = float(np.sqrt(p * q).sum())
    return math.sqrt(max(0.0, 2.0 * (1.0 - bc)))


def kl_divergence(p, q) -> float:
    """Kullback-Leibler divergence sum(p_i * ln(p_i / q_i)), with 0*ln(0/q)=0.

    Requires q_i > 0 wherever p_i > 0 (always true for posterior means with
    a positive prior concentration).
    """
    p, q = _checked_pair(p, q)
    support = p > 0
    if np.any(q[support] == 0):
        raise InfiniteDivergenceError(
            "q has a zero component inside the support of p"
        )
    ps = p[support]
    val = float((ps * np.log(ps / q[support])).sum())
    # tiny negative drift is floating-point noise; KL >= 0
    return max(0.0, val)


_METRIC_FUNCS = {Metric.HELLINGER: hellinger, Metric.KL: kl_divergence}


def distance(p, q, metric: Metric = Metric.HELLINGER) -> float:
    return _METRIC_FUNCS[Metric(metric)](p, q)
