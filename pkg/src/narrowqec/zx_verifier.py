"""A small ZX-calculus engine restricted to Pauli phases (0 or pi).

Diagrams are graphs of Z/X spiders plus boundary nodes. Phases are stored as
integers k meaning k*pi, always reduced mod 2, so every tensor here has entries
in {0, +-1} before scalar normalisation. Equality is up to a global nonzero
scalar, which `compare` reports.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

MAX_BOUNDARY = 10
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@dataclass
class Node:
    kind: str  # "Z", "X" or "B" (boundary)
    phase: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "X", "B"):
            raise ValueError(f"bad node kind {self.kind!r}")
        self.phase %= 2


@dataclass
class ZXDiagram:
    nodes: dict = field(default_factory=dict)  # id -> Node
    edges: list = field(default_factory=list)  # (u, v), parallel edges allowed
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)

    def add(self, nid, kind: str, phase: int = 0):
        if nid in self.nodes:
            raise ValueError(f"duplicate node {nid!r}")
        self.nodes[nid] = Node(kind, phase)
        return nid

    def connect(self, u, v):
        if u not in self.nodes or v not in self.nodes:
            raise KeyError(f"edge ({u!r}, {v!r}) references an unknown node")
        self.edges.append((u, v))

    def degree(self, nid) -> int:
        return sum((u == nid) + (v == nid) for u, v in self.edges)

    @property
    def boundary(self) -> list:
        return list(self.inputs) + list(self.outputs)

    def validate(self):
        for b in self.boundary:
            if self.nodes[b].kind != "B":
                raise ValueError(f"boundary {b!r} is not a boundary node")
            if self.degree(b) != 1:
                raise ValueError(f"boundary {b!r} has degree {self.degree(b)}")
        for nid, n in self.nodes.items():
            if n.kind == "B" and nid not in self.boundary:
                raise ValueError(f"boundary node {nid!r} is not listed as an input or output")

    def copy(self) -> ZXDiagram:
        return ZXDiagram({k: Node(n.kind, n.phase) for k, n in self.nodes.items()},
                         list(self.edges), list(self.inputs), list(self.outputs))

    def spiders(self) -> list:
        return [k for k, n in self.nodes.items() if n.kind != "B"]

    def to_json(self) -> str:
        return json.dumps({
            "nodes": [{"id": k, "kind": n.kind, "phase": n.phase} for k, n in self.nodes.items()],
            "edges": [list(e) for e in self.edges],
            "inputs": self.inputs, "outputs": self.outputs,
        })

    @classmethod
    def from_json(cls, text: str) -> ZXDiagram:
        raw = json.loads(text)
        d = cls()
        for n in raw["nodes"]:
            d.add(n["id"], n["kind"], n.get("phase", 0))
        for u, v in raw["edges"]:
            d.connect(u, v)
        d.inputs, d.outputs = list(raw["inputs"]), list(raw["outputs"])
        return d


def fuse(d: ZXDiagram) -> ZXDiagram:
    """Spider fusion to a fixed point; self-loops on spiders are dropped."""
    d = d.copy()
    while True:
        d.edges = [(u, v) for u, v in d.edges if not (u == v and d.nodes[u].kind != "B")]
        target = next(((u, v) for u, v in d.edges
                       if d.nodes[u].kind != "B" and d.nodes[u].kind == d.nodes[v].kind), None)
        if target is None:
            return d
        keep, gone = target
        d.edges.remove(target)
        d.nodes[keep].phase = (d.nodes[keep].phase + d.nodes[gone].phase) % 2
        d.edges = [(keep if u == gone else u, keep if v == gone else v) for u, v in d.edges]
        del d.nodes[gone]


def _spider_tensor(kind: str, phase: int, arity: int) -> np.ndarray:
    t = np.zeros((2,) * arity, dtype=complex)
    if arity == 0:
        return np.array(1 + (-1) ** phase, dtype=complex)
    t[(0,) * arity] = 1
    t[(1,) * arity] = (-1) ** phase
    if kind == "X":
        for ax in range(arity):
            t = np.moveaxis(np.tensordot(_H, t, axes=([1], [ax])), 0, ax)
    return t


def to_tensor(d: ZXDiagram) -> np.ndarray:
    """Dense linear map, shape (2**len(outputs), 2**len(inputs)), big-endian wire order."""
    d.validate()
    nb = len(d.boundary)
    if nb > MAX_BOUNDARY:
        raise ValueError(f"{nb} boundary wires exceeds the dense limit of {MAX_BOUNDARY}")
    # one einsum label per edge
    legs: dict = {k: [] for k in d.nodes}
    operands = []
    for i, (u, v) in enumerate(d.edges):
        legs[u].append(i)
        legs[v].append(i)
    out_label = {}
    for i, (u, v) in enumerate(d.edges):
        if d.nodes[u].kind == "B" and d.nodes[v].kind == "B":
            # bare wire: split into two labels joined by an identity
            j = len(d.edges) + i
            legs[v] = [j]
            operands += [np.eye(2, dtype=complex), [i, j]]
    for k, n in d.nodes.items():
        if n.kind == "B":
            out_label[k] = legs[k][0]
            continue
        operands += [_spider_tensor(n.kind, n.phase, len(legs[k])), legs[k]]
    order = [out_label[b] for b in d.outputs] + [out_label[b] for b in d.inputs]
    if len(set(order)) != len(order):
        raise ValueError("an edge joins two boundary wires of the same label")
    if not operands:
        raise ValueError("empty diagram")
    t = np.einsum(*operands, order, optimize="greedy")
    return np.asarray(t).reshape(2 ** len(d.outputs), 2 ** len(d.inputs))


def compare(a: np.ndarray, b: np.ndarray, atol: float = 1e-9) -> tuple[bool, complex]:
    """(a == s*b for some nonzero s, s)."""
    if a.shape != b.shape:
        return False, 0j
    ia = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    ib = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[ia]) < atol or abs(b[ib]) < atol:
        both_zero = abs(a[ia]) < atol and abs(b[ib]) < atol
        return both_zero, 0j
    s = a[ib] / b[ib]
    if abs(s) < atol:
        return False, 0j
    return bool(np.allclose(a, s * b, atol=atol)), complex(s)


def equivalent(d1: ZXDiagram, d2: ZXDiagram) -> bool:
    return compare(to_tensor(d1), to_tensor(d2))[0]


# -- named diagrams -------------------------------------------------------------

def _two_wire_frame() -> ZXDiagram:
    d = ZXDiagram()
    for b in ("in_a", "out_a", "in_b", "out_b"):
        d.add(b, "B")
    d.add("xa", "X")
    d.add("xb", "X")
    d.connect("in_a", "xa")
    d.connect("xa", "out_a")
    d.connect("in_b", "xb")
    d.connect("xb", "out_b")
    d.inputs, d.outputs = ["in_a", "in_b"], ["out_a", "out_b"]
    return d


def folded_bus_diagram(E1=0, E2=0, E3=0, E4_1=0, E4_2=0, M_a2=0, M_1=0, M_2=0) -> ZXDiagram:
    """One bus iteration with every short error chain as a pi phase on a Z node."""
    d = _two_wire_frame()
    for nid, ph in (("e1", E1), ("e2", E2), ("hub", 0), ("e3", E3), ("ma2", M_a2),
                    ("e41", E4_1), ("m1", M_1), ("e42", E4_2), ("m2", M_2)):
        d.add(nid, "Z", ph)
    for u, v in (("e1", "e2"), ("e2", "hub"), ("hub", "e3"), ("e3", "ma2"),
                 ("hub", "e41"), ("e41", "m1"), ("m1", "xb"),
                 ("hub", "e42"), ("e42", "m2"), ("m2", "xa")):
        d.connect(u, v)
    return d


def parity_measurement_diagram(E=0, M=0) -> ZXDiagram:
    """XX parity via two CNOTs onto a |+> ancilla, with an error E and outcome M."""
    d = _two_wire_frame()
    for nid, ph in (("prep", 0), ("ca", 0), ("cb", 0), ("err", E), ("meas", M)):
        d.add(nid, "Z", ph)
    for u, v in (("prep", "ca"), ("ca", "cb"), ("cb", "err"), ("err", "meas"),
                 ("cb", "xb"), ("ca", "xa")):
        d.connect(u, v)
    return d


def verify_bus_equivalence(E1, E2, E3, E4_1, E4_2, M_a2, M_1, M_2) -> bool:
    E = (E1 + E2 + E3 + E4_1 + E4_2) % 2
    M = (M_a2 + M_1 + M_2) % 2
    lhs = folded_bus_diagram(E1, E2, E3, E4_1, E4_2, M_a2, M_1, M_2)
    return equivalent(lhs, parity_measurement_diagram(E, M))


def sweep_bus_equivalence() -> tuple[int, int]:
    """(passing, total) over every assignment of the eight bits."""
    ok = sum(verify_bus_equivalence(*bits) for bits in itertools.product((0, 1), repeat=8))
    return ok, 2 ** 8


def ideal_parity_projector(outcome: int = 0) -> np.ndarray:
    """(I + (-1)^outcome XX)/2 on two qubits."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    return (np.eye(4) + (-1) ** outcome * np.kron(x, x)) / 2


def smooth_split() -> ZXDiagram:
    d = ZXDiagram()
    d.add("in", "B")
    d.add("o1", "B")
    d.add("o2", "B")
    d.add("z", "Z")
    for b in ("in", "o1", "o2"):
        d.connect(b, "z")
    d.inputs, d.outputs = ["in"], ["o1", "o2"]
    return d


def rough_merge(b: int = 0) -> ZXDiagram:
    """X spider joining two wires; the second input carries the outcome-dependent Z correction."""
    d = ZXDiagram()
    for nid in ("i1", "i2", "out"):
        d.add(nid, "B")
    d.add("corr", "Z", b)
    d.add("x", "X")
    d.connect("i1", "x")
    d.connect("i2", "corr")
    d.connect("corr", "x")
    d.connect("x", "out")
    d.inputs, d.outputs = ["i1", "i2"], ["out"]
    return d


def cnot_diagram() -> ZXDiagram:
    d = ZXDiagram()
    for nid in ("c_in", "c_out", "t_in", "t_out"):
        d.add(nid, "B")
    d.add("zc", "Z")
    d.add("xt", "X")
    d.connect("c_in", "zc")
    d.connect("zc", "c_out")
    d.connect("t_in", "xt")
    d.connect("xt", "t_out")
    d.connect("zc", "xt")
    d.inputs, d.outputs = ["c_in", "t_in"], ["c_out", "t_out"]
    return d
