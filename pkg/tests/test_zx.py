import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from narrowqec.zx_verifier import (ZXDiagram, cnot_diagram, compare, folded_bus_diagram, fuse,
                                   ideal_parity_projector, parity_measurement_diagram, rough_merge,
                                   smooth_split, to_tensor, verify_bus_equivalence)

X = np.array([[0, 1], [1, 0]])
Z = np.diag([1, -1])


def wire(kind, phase):
    d = ZXDiagram()
    d.add("i", "B")
    d.add("o", "B")
    d.add("s", kind, phase)
    d.connect("i", "s")
    d.connect("s", "o")
    d.inputs, d.outputs = ["i"], ["o"]
    return d


@pytest.mark.parametrize("kind,phase,expect", [("Z", 0, np.eye(2)), ("Z", 1, Z), ("X", 0, np.eye(2)), ("X", 1, X)])
def test_single_wire_spiders(kind, phase, expect):
    ok, s = compare(to_tensor(wire(kind, phase)), expect)
    assert ok and abs(s) > 0


def test_cnot():
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    ok, s = compare(to_tensor(cnot_diagram()), cnot)
    assert ok and s == pytest.approx(1 / np.sqrt(2))


def test_split_and_merge():
    split = np.zeros((4, 2))
    split[0, 0] = split[3, 1] = 1
    assert compare(to_tensor(smooth_split()), split)[0]
    xor = np.array([[1, 0, 0, 1], [0, 1, 1, 0]])
    assert compare(to_tensor(rough_merge(0)), xor)[0]
    assert compare(to_tensor(rough_merge(1)), xor @ np.kron(np.eye(2), Z))[0]


@pytest.mark.parametrize("E,M", list(itertools.product((0, 1), repeat=2)))
def test_parity_measurement_is_projector(E, M):
    ok, s = compare(to_tensor(parity_measurement_diagram(E, M)), ideal_parity_projector((E + M) % 2))
    assert ok
    if (E, M) == (0, 0):
        assert s == pytest.approx(1)


def test_bus_outcome_parity_matters():
    assert verify_bus_equivalence(0, 0, 0, 0, 0, 0, 0, 0)
    # unaccounted error: the bus with E1 flipped is not the clean parity measurement
    lhs = to_tensor(folded_bus_diagram(E1=1))
    assert not compare(lhs, to_tensor(parity_measurement_diagram(0, 0)))[0]
    assert compare(lhs, to_tensor(parity_measurement_diagram(1, 0)))[0]


@st.composite
def diagrams(draw):
    d = ZXDiagram()
    for b in ("i0", "i1", "o0", "o1"):
        d.add(b, "B")
    n = draw(st.integers(1, 6))
    for k in range(n):
        d.add(k, draw(st.sampled_from("ZX")), draw(st.integers(0, 1)))
    for b in ("i0", "i1", "o0", "o1"):
        d.connect(b, draw(st.integers(0, n - 1)))
    for _ in range(draw(st.integers(0, 8))):
        d.connect(draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1)))
    d.inputs, d.outputs = ["i0", "i1"], ["o0", "o1"]
    return d


@settings(max_examples=80, deadline=None)
@given(diagrams())
def test_fusion_preserves_the_map(d):
    before = to_tensor(d)
    after = to_tensor(fuse(d))
    np.testing.assert_allclose(after, before, atol=1e-9)
    fused = fuse(d)
    for u, v in fused.edges:
        nu, nv = fused.nodes[u], fused.nodes[v]
        assert nu.kind == "B" or nu.kind != nv.kind or u == v


def test_json_round_trip():
    d = folded_bus_diagram(1, 0, 1, 0, 0, 1, 0, 0)
    back = ZXDiagram.from_json(d.to_json())
    np.testing.assert_allclose(to_tensor(back), to_tensor(d))


def test_validation():
    d = wire("Z", 0)
    d.connect("i", "s")
    with pytest.raises(ValueError):
        to_tensor(d)
    with pytest.raises(KeyError):
        wire("Z", 0).connect("i", "nope")
    with pytest.raises(ValueError):
        wire("Z", 0).add("s", "Z")
    big = ZXDiagram()
    big.add("s", "Z")
    for k in range(11):
        big.add(k, "B")
        big.connect(k, "s")
    big.inputs = list(range(11))
    with pytest.raises(ValueError):
        to_tensor(big)
