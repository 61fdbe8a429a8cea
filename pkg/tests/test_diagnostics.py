import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from projlab.diagnostics import (
    AsymptoticModel,
    GammaSumSeries,
    asymptotic_ratio,
    decade_checkpoints,
    gamma_partial_sums,
    growth_exponent,
)


def test_decade_checkpoints():
    assert decade_checkpoints(12345) == [10, 100, 1000, 10000]
    assert decade_checkpoints(5) == []
    assert decade_checkpoints(10**9)[-1] == 10**7


def test_gamma_sums_small_example():
    s = gamma_partial_sums([1.0, 2.0, 3.0], [1.0, 2.0], [1, 3])
    assert s.at(1.0, 3) == 6.0 and s.at(2.0, 3) == 14.0 and s.at(2.0, 1) == 1.0
    assert s.tail(2.0, 1, 3) == 13.0


def test_gamma_sums_validation():
    with pytest.raises(ValueError):
        gamma_partial_sums([1.0, 2.0], [1.0], [2, 1])
    with pytest.raises(ValueError):
        gamma_partial_sums([1.0, 2.0], [1.0], [3])
    with pytest.raises(ValueError):
        gamma_partial_sums([1.0, 2.0], [], [1])


@given(arrays(float, st.integers(1, 300), elements=st.floats(0, 1e3)), st.sampled_from([0.25, 0.5, 1.0, 2.0]))
def test_gamma_sums_match_exact_sum(norms, g):
    cps = sorted({1, norms.size // 2 or 1, norms.size})
    s = gamma_partial_sums(norms, [g], cps)
    assert s.at(g, cps[0]) == math.fsum((norms[:cps[0]] ** g).tolist())
    for c in cps:
        exact = math.fsum((norms[:c] ** g).tolist())
        assert abs(s.at(g, c) - exact) <= 4 * np.finfo(float).eps * exact


def test_tail_survives_cancellation():
    norms = np.concatenate([np.ones(1000), np.full(1000, 1e-30)])
    s = gamma_partial_sums(norms, [1.0], [1000, 2000])
    assert s.partial_sums[0, 1] - s.partial_sums[0, 0] == 0.0
    assert s.tail(1.0, 1000, 2000) == pytest.approx(1e-27, rel=1e-12)


def test_zero_steps_contribute_nothing():
    s = gamma_partial_sums([0.0, 0.0, 1.0], [0.25], [3])
    assert s.at(0.25, 3) == 1.0


def test_growth_exponent_of_power_law():
    cps = [10**k for k in range(1, 7)]
    for a in (0.5, 0.25):
        s = GammaSumSeries((1.0,), tuple(cps), np.array([[float(c) ** a for c in cps]]))
        assert growth_exponent(s, 1.0) == pytest.approx(a, abs=1e-12)


def test_growth_exponent_of_convergent_series():
    n = np.arange(1, 10**5 + 1, dtype=float)
    s = gamma_partial_sums(2.0**-n, [1.0], [10, 100, 1000, 10**4, 10**5])
    assert abs(growth_exponent(s, 1.0)) < 1e-12


def test_growth_exponent_needs_two_decades():
    s = GammaSumSeries((1.0,), (10, 100), np.array([[1.0, 2.0]]))
    with pytest.raises(ValueError):
        growth_exponent(s, 1.0)


def test_asymptotic_ratio():
    model = AsymptoticModel(-3, 2, 2.0)
    n = 10**4
    series = np.zeros(n + 1)
    series[n] = math.sqrt(2.0 / math.log(n))
    assert asymptotic_ratio(series, model, [n])[0] == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(ValueError):
        asymptotic_ratio(series, model, [2])
    with pytest.raises(ValueError):
        asymptotic_ratio(series, model, [5])
    with pytest.raises(ValueError):
        AsymptoticModel(-3, 0, 2.0)
