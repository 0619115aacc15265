import math
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from narrowqec.bus_model import (BusConfig, BusInfeasible, bus_performance, folded_iteration_error,
                                 ghz_bus_max_length, majority_failure, max_bus_length, repetitions_needed)


def tail(q, r):
    if q == 0:
        return 0.0
    lc = lambda k: math.lgamma(r + 1) - math.lgamma(k + 1) - math.lgamma(r - k + 1)
    return sum(math.exp(lc(k) + k * math.log(q) + (r - k) * math.log1p(-q)) for k in range(r // 2 + 1, r + 1))


def test_ghz_quoted_lengths():
    assert [ghz_bus_max_length(1e-3, d) for d in (3, 5, 7)] == [13, 4, 2]


def test_ghz_boundary_is_strict():
    # 13 * 4 * 9 * p == 1/2 exactly, so N = 13 is excluded
    assert ghz_bus_max_length(Fraction(1, 936), 3) == 12
    assert ghz_bus_max_length(Fraction(1, 937), 3) == 13


@given(st.floats(1e-6, 1e-2), st.sampled_from([3, 5, 7, 9]), st.integers(4, 8))
def test_ghz_definition(p, d, t):
    n = ghz_bus_max_length(p, d, t)
    assert n * t * d * d * p < 0.5 <= (n + 1) * t * d * d * p * (1 + 1e-12)


def test_ghz_rejects_bad_args():
    with pytest.raises(ValueError):
        ghz_bus_max_length(1e-3, 3, t=3)
    with pytest.raises(ValueError):
        ghz_bus_max_length(0, 3)


@given(st.floats(0, 0.499), st.integers(0, 40))
def test_majority_failure_matches_sum(q, k):
    r = 2 * k + 1
    assert majority_failure(q, r) == pytest.approx(tail(q, r), abs=1e-12)


def test_repetition_examples():
    assert repetitions_needed(0.0, 1e-9) == 1
    assert repetitions_needed(0.1, 0.028) == 3
    with pytest.raises(BusInfeasible):
        repetitions_needed(0.5, 1e-3)
    with pytest.warns(RuntimeWarning):
        assert repetitions_needed(0.49, 1e-6) > 1000


@settings(deadline=None)
@given(st.floats(1e-4, 0.4), st.floats(1e-12, 1e-2))
def test_repetitions_odd_and_minimal(q, target):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = repetitions_needed(q, target)
    assert r % 2 == 1
    assert tail(q, r) <= target * (1 + 1e-9)
    if r > 1:
        assert tail(q, r - 2) > target


def test_zero_noise_budget():
    b = folded_iteration_error(BusConfig(3, 5, 4, 0.0))
    assert all(v == 0 for v in b.terms().values())
    assert b.total == 0


def test_feasible_reference_point():
    b = folded_iteration_error(BusConfig(3, 13, 2, 1e-3))
    assert b.total < 0.5
    assert b.E4_1 == b.E4_2
    assert b.total <= b.total_sum


@pytest.mark.parametrize("w", [3, 5, 7])
def test_longer_bus_costs_more(w):
    a = folded_iteration_error(BusConfig(w, 5, 3, 1e-3)).total
    b = folded_iteration_error(BusConfig(w, 5, 6, 1e-3)).total
    assert b > a


def test_dominant_terms_subset():
    cfg = BusConfig(3, 7, 3, 1e-3)
    full = folded_iteration_error(cfg)
    dom = folded_iteration_error(cfg, dominant_only=True)
    assert set(dom.charged) == {"E2", "E4_1", "E4_2"}
    assert dom.total_sum <= full.total_sum


def test_max_length_trends():
    ps = [2e-4, 5e-4, 1e-3, 2e-3]
    lengths = [max_bus_length(3, 7, p) for p in ps]
    assert lengths == sorted(lengths, reverse=True)
    for d in (5, 9):
        assert max_bus_length(5, d, 1e-3) >= max_bus_length(3, d, 1e-3)


def test_unfitted_width_needs_extrapolation():
    with pytest.raises(ValueError):
        folded_iteration_error(BusConfig(9, 5, 2, 1e-3))
    assert folded_iteration_error(BusConfig(9, 5, 2, 1e-3), extrapolate=True).total > 0


def test_bus_config_validation():
    for kw in ({"w": 0, "d": 3}, {"w": 3, "d": 4}, {"w": 3, "d": 3, "N": 1}, {"w": 3, "d": 3, "t": 2}):
        with pytest.raises(ValueError):
            BusConfig(**kw)


def test_performance_bus_error_under_memory_error():
    perf = bus_performance(BusConfig(5, 11, 2, 1e-3))
    assert perf.repetitions % 2 == 1
    assert perf.bus_error <= perf.patch_error * (1 + 1e-9)
    with pytest.raises(BusInfeasible):
        bus_performance(BusConfig(3, 5, 50, 4e-3))
