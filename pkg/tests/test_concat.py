import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from narrowqec.block_codes import logical_rate_fit
from narrowqec.concat_estimator import (INFEASIBLE, ArchitectureRow, SearchSpace, TimeScaling, block_size,
                                        bus_cnot_rate, concatenated_rate, default_scaling, evaluate,
                                        published_rows, qubit_density, recompute, sc_lattice_surgery_rate,
                                        search_min_width, width)

odd = st.integers(1, 30).map(lambda k: 2 * k + 1)


@given(odd, odd)
def test_width_formulas(d, b):
    assert width(d) == 4 * d - 1
    assert width(d, b) == 2 * d + 2 * b - 1


def test_block_sizes_by_hand():
    assert block_size("surface", 0, 27, None) == 107 * 108 // 2
    assert block_size("surface_bus", 0, 31, 5) == 71 * 72
    assert block_size("steane713", 2, 11, 5) == 31 * 32 * 11 * 9
    assert block_size("css1573", 3, 19, 7) == 51 * 52 * 20 * 18**2
    assert qubit_density("css1573", 3, 19, 7) == pytest.approx(51 * 52 * 20 * 324 / 343)
    assert qubit_density("steane713", 2, 11, 5) == block_size("steane713", 2, 11, 5)


def test_published_rows_loaded():
    rows = published_rows()
    assert len(rows) == 33
    assert {r.stack for r in rows} == {"surface", "surface_bus", "steane713", "css1573"}


@pytest.mark.parametrize("stack", ["surface", "surface_bus"])
def test_surface_searches_reproduce_widths(stack):
    for r in (r for r in published_rows() if r.stack == stack):
        (best,) = search_min_width(stack, r.p)
        assert best.w == r.w
        assert best.p_l <= 1e-15


def test_surface_rates_close_to_rows():
    for r in published_rows():
        if r.stack == "surface":
            assert recompute(r).p_l == pytest.approx(r.p_l, rel=0.1)


def test_lattice_surgery_rate():
    from narrowqec.montecarlo_stats import sc_round
    assert sc_lattice_surgery_rate(5, 1e-3) == pytest.approx(6 * sc_round(5, 1e-3))
    with pytest.raises(ValueError):
        sc_lattice_surgery_rate(4, 1e-3)


def test_scaling_round_trip_and_levels():
    s = TimeScaling((1.0, 2.0, 3.0), (4.0, 5.0, 6.0), 2)
    assert TimeScaling.load(s.to_json()) == s
    assert s.factor("steane713", 1) == 1.0
    assert s.factor("steane713", 7) == 3.0
    assert default_scaling().bus_length == 2


def test_recursion_matches_manual_composition():
    s = TimeScaling((2.0, 3.0, 5.0), (1.0, 1.0, 1.0))
    r0 = bus_cnot_rate(11, 5, 2e-4, s.bus_length)
    manual = logical_rate_fit("steane713", 3.0 * logical_rate_fit("steane713", 2.0 * r0))
    assert concatenated_rate("steane713", 2, 11, 5, 2e-4, s) == pytest.approx(manual)


def test_infeasible_above_fit_range():
    assert concatenated_rate("steane713", 3, 5, 3, 5e-3) == INFEASIBLE
    assert not evaluate("steane713", 3, 5, 3, 5e-3).feasible


@given(st.sampled_from([1, 2, 3]), st.floats(5e-5, 4e-4))
def test_more_noise_never_helps(levels, p):
    a = concatenated_rate("steane713", levels, 13, 5, p)
    b = concatenated_rate("steane713", levels, 13, 5, p * 1.5)
    assert b >= a


def test_search_returns_narrowest_per_level():
    rows = search_min_width("steane713", 1e-3, space=SearchSpace(max_levels=3))
    assert [r.levels for r in rows] == [1, 2, 3]
    for r in rows:
        assert r.feasible
        narrower = [evaluate("steane713", r.levels, d, b, 1e-3).feasible
                    for d in range(3, 61, 2) for b in (3, 5, 7) if width(d, b) < r.w]
        assert not any(narrower)


def test_row_dict():
    row = ArchitectureRow("steane713", 1, 11, 5, 1e-3, 1e-16)
    d = row.as_dict()
    assert d["w"] == 31 and d["feasible"] and math.isclose(d["block_size"], 31 * 32 * 11)
