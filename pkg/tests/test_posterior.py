"""Dirichlet-categorical posterior state: means, updates, exchangeability."""

from fractions import Fraction

import numpy as np
import pytest

from urndist import (ConfigError, EmptyIntervalError, PosteriorState,
                     TemporalSpread, new_state)
from conftest import COLOR_INDEX, URN_DRAWS


def spread(cat, j0=0, j1=None, value=1.0, J=1, key="k"):
    return TemporalSpread(record_key=key, category_index=cat,
                          first_interval=j0,
                          last_interval=j0 if j1 is None else j1,
                          value=value, interval_count=J)


def test_symmetric_prior_mean():
    st = new_state("s", K=3, J=2, alpha0=1.0)
    np.testing.assert_allclose(st.posterior_mean(0), [1/3, 1/3, 1/3])


def test_zero_prior_undefined_until_first_draw():
    st = new_state("s", K=3, J=1, alpha0=0.0)
    with pytest.raises(EmptyIntervalError):
        st.posterior_mean(0)
    st.update(spread(cat=0))
    np.testing.assert_allclose(st.posterior_mean(0), [1.0, 0.0, 0.0])


@pytest.mark.parametrize("kwargs", [
    dict(K=1, J=1), dict(K=3, J=0), dict(K=3, J=1, alpha0=-0.5),
])
def test_degenerate_configuration_rejected(kwargs):
    with pytest.raises(ConfigError):
        new_state("s", **{"alpha0": 1.0, **kwargs})


def test_single_update_mean():
    st = new_state("s", K=3, J=8, alpha0=1.0)
    st.update(spread(cat=0, j0=5, J=8))
    np.testing.assert_allclose(st.posterior_mean(5), [0.5, 0.25, 0.25])
    # other intervals keep the prior mean
    np.testing.assert_allclose(st.posterior_mean(0), [1/3, 1/3, 1/3])


def test_urn1_sequence_reproduces_running_frequencies():
    st = new_state("urn1", K=3, J=1, alpha0=0.0)
    seen = []
    for t, color in enumerate(URN_DRAWS["u1"], start=1):
        st.update(spread(cat=COLOR_INDEX[color]))
        seen.append(st.posterior_mean(0).copy())
        # exact-rational oracle for the empirical frequency
        counts = [sum(1 for c in URN_DRAWS["u1"][:t] if COLOR_INDEX[c] == k)
                  for k in range(3)]
        oracle = [Fraction(c, t) for c in counts]
        np.testing.assert_allclose(seen[-1], [float(f) for f in oracle],
                                   atol=1e-15)
    np.testing.assert_allclose(seen[-1], [0.50, 0.40, 0.10], atol=1e-15)


def test_update_order_does_not_change_the_endpoint():
    rng = np.random.default_rng(7)
    spreads = [spread(cat=int(rng.integers(0, 4)), j0=int(rng.integers(0, 3)),
                      value=float(rng.uniform(0.1, 3)), J=3, key=f"k{i}")
               for i in range(25)]
    a = new_state("a", K=4, J=3, alpha0=1.0)
    b = new_state("b", K=4, J=3, alpha0=1.0)
    for sp in spreads:
        a.update(sp)
    for sp in rng.permutation(np.array(spreads, dtype=object)):
        b.update(sp)
    np.testing.assert_allclose(a.accumulated, b.accumulated, atol=1e-12)
    for j in range(3):
        np.testing.assert_allclose(a.posterior_mean(j), b.posterior_mean(j),
                                   atol=1e-12)


def test_posterior_mean_examples():
    st = new_state("s", K=3, J=1, alpha0=1.0)
    for _ in range(4):
        st.update(spread(cat=0))
    np.testing.assert_allclose(st.posterior_mean(0), [5/7, 1/7, 1/7])

    st14 = new_state("s", K=14, J=1, alpha0=1.0)
    np.testing.assert_allclose(st14.posterior_mean(0), np.full(14, 1/14))


def test_update_contract_errors():
    st = new_state("s", K=3, J=2, alpha0=1.0)
    with pytest.raises(ValueError, match="category index"):
        st.update(spread(cat=3, J=2))
    with pytest.raises(ValueError, match="intervals"):
        st.update(spread(cat=0, J=5))


def test_mean_matches_rational_oracle_on_random_cases():
    rng = np.random.default_rng(11)
    for _ in range(200):
        K = int(rng.integers(2, 6))
        alpha0 = float(rng.choice([0.0, 0.5, 1.0, 2.0]))
        st = new_state("s", K=K, J=1, alpha0=alpha0)
        counts = [Fraction(0)] * K
        n_draws = int(rng.integers(1, 21))
        for _ in range(n_draws):
            k = int(rng.integers(0, K))
            # quarter-integer values stay exact in binary floats
            v = Fraction(int(rng.integers(1, 12)), 4)
            st.update(spread(cat=k, value=float(v)))
            counts[k] += v
        n = sum(counts)
        a = Fraction(alpha0)
        oracle = [(a + c) / (K * a + n) for c in counts]
        got = st.posterior_mean(0)
        np.testing.assert_allclose(got, [float(f) for f in oracle], atol=1e-12)
        assert abs(got.sum() - 1.0) < 1e-12
        assert got.min() >= 0


def test_copy_is_independent():
    st = new_state("s", K=3, J=1, alpha0=1.0)
    dup = st.copy()
    st.update(spread(cat=0))
    assert dup.n_per_interval[0] == 0 and st.n_per_interval[0] == 1.0
