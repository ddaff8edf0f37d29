"""Hellinger and KL: worked values, axioms, and the divergence bound."""

import math

import numpy as np
import pytest

from urndist import (InfiniteDivergenceError, SQRT2, hellinger,
                     kl_divergence)
from urndist.metrics import Metric, distance


def test_identity_of_indiscernibles():
    assert hellinger([0.2, 0.3, 0.5], [0.2, 0.3, 0.5]) == 0.0


def test_disjoint_support_attains_sqrt2():
    assert hellinger([1, 0, 0], [0, 1, 0]) == pytest.approx(SQRT2, abs=1e-15)


def test_urn_endpoint_value():
    # overlap coefficient computed independently from the final urn
    # frequencies: sqrt(.5*.4) + sqrt(.4*.2) + sqrt(.1*.4)
    bc = math.sqrt(0.20) + math.sqrt(0.08) + math.sqrt(0.04)
    expect = math.sqrt(2.0 * (1.0 - bc))
    assert expect == pytest.approx(0.37402, abs=1e-4)
    assert hellinger([0.5, 0.4, 0.1], [0.4, 0.2, 0.4]) == \
        pytest.approx(expect, abs=1e-15)


def test_input_contracts():
    with pytest.raises(ValueError, match="equal-length"):
        hellinger([0.5, 0.5], [1.0, 0.0, 0.0])
    with pytest.raises(ValueError, match="sums to"):
        hellinger([0.5, 0.6], [0.5, 0.5])
    with pytest.raises(ValueError, match="negative"):
        hellinger([1.2, -0.2], [0.5, 0.5])
    with pytest.raises(ValueError, match="at least 2"):
        hellinger([1.0], [1.0])


def test_symmetry_bounds_and_triangle_on_random_pairs():
    rng = np.random.default_rng(42)
    for _ in range(300):
        K = int(rng.integers(2, 9))
        p, q, r = rng.dirichlet(np.ones(K), size=3)
        h_pq = hellinger(p, q)
        assert h_pq == hellinger(q, p)  # exact symmetry
        assert 0.0 <= h_pq <= SQRT2 + 1e-12
        assert h_pq <= hellinger(p, r) + hellinger(r, q) + 1e-12
        # relabeling categories consistently leaves the distance unchanged
        perm = rng.permutation(K)
        assert hellinger(p[perm], q[perm]) == pytest.approx(h_pq, abs=1e-12)


def test_kl_worked_values():
    assert kl_divergence([0.3, 0.7], [0.3, 0.7]) == 0.0
    expect = 0.5 * math.log(2.0) + 0.5 * math.log(2.0 / 3.0)
    assert kl_divergence([0.5, 0.5], [0.25, 0.75]) == \
        pytest.approx(expect, abs=1e-15)
    assert expect == pytest.approx(0.14384, abs=1e-5)


def test_kl_zero_times_log_zero_is_zero():
    assert kl_divergence([0.0, 1.0], [0.5, 0.5]) == \
        pytest.approx(math.log(2.0), abs=1e-15)


def test_kl_infinite_divergence():
    with pytest.raises(InfiniteDivergenceError):
        kl_divergence([0.5, 0.5], [1.0, 0.0])


def test_kl_dominates_squared_hellinger():
    # KL(p||q) >= 2(1 - BC) = H^2; the sqrt-scale analogue is false for
    # nearby distributions (see the worked pair below)
    rng = np.random.default_rng(3)
    for _ in range(200):
        K = int(rng.integers(2, 7))
        p, q = rng.dirichlet(np.ones(K), size=2)
        h = hellinger(p, q)
        assert kl_divergence(p, q) >= h * h - 1e-12
    p, q = [0.2, 0.3, 0.5], [0.4, 0.2, 0.4]
    assert kl_divergence(p, q) < hellinger(p, q)  # sqrt-scale bound fails


def test_kl_asymmetric_and_nonnegative():
    rng = np.random.default_rng(8)
    p, q = rng.dirichlet(np.ones(4), size=2)
    assert kl_divergence(p, q) != kl_divergence(q, p)
    assert kl_divergence(p, q) >= 0.0


def test_distance_dispatch():
    p, q = [0.5, 0.5], [0.25, 0.75]
    assert distance(p, q, Metric.HELLINGER) == hellinger(p, q)
    assert distance(p, q, "kl") == kl_divergence(p, q)
