"""Rotated rectangular surface-code patches and their memory circuits.

Coordinates: data qubit ``(r, c)`` with ``0 <= r < d_X`` rows and
``0 <= c < d_Z`` columns.  Plaquettes sit at half-integer centres.  Top and
bottom edges carry weight-2 X checks, left and right edges weight-2 Z checks,
so the Z logical is a horizontal row (weight d_Z) and the X logical a
vertical column (weight d_X).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .stabilizer_sim.circuit import Circuit
from .stabilizer_sim.frames import FrameSimulator
from .stabilizer_sim.noise import ONE_QUBIT_PAULIS, TWO_QUBIT_PAULIS, NoiseModel

# corner offsets (dr, dc) of a plaquette centred at (i+0.5, j+0.5)
NW, NE, SW, SE = (0, 0), (0, 1), (1, 0), (1, 1)
# Z-shape for X checks, N-shape for Z checks: hooks end up perpendicular to the matching logical
X_ORDER = (NW, NE, SW, SE)
Z_ORDER = (NW, SW, NE, SE)


@dataclass(frozen=True)
class PatchDims:
    d_X: int
    d_Z: int
    rounds: int | None = None

    def __post_init__(self):
        for name in ("d_X", "d_Z"):
            d = getattr(self, name)
            if d < 3 or d % 2 == 0:
                raise ValueError(f"{name} must be odd and >= 3, got {d}")
        if self.rounds is None:
            object.__setattr__(self, "rounds", self.d_Z)
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")

    @property
    def num_qubits(self) -> int:
        return 2 * self.d_X * self.d_Z - 1


class Plaquette(NamedTuple):
    kind: str  # "X" or "Z"
    centre: tuple[float, float]
    # data qubit per CNOT step, None where the corner is off the patch
    schedule: tuple[int | None, int | None, int | None, int | None]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(q for q in self.schedule if q is not None))


@dataclass
class PatchLayout:
    dims: PatchDims
    data: list[tuple[int, int]] = field(default_factory=list)
    plaquettes: list[Plaquette] = field(default_factory=list)

    @classmethod
    def build(cls, dims: PatchDims) -> "PatchLayout":
        dx, dz = dims.d_X, dims.d_Z
        lay = cls(dims, [(r, c) for r in range(dx) for c in range(dz)])
        index = {rc: k for k, rc in enumerate(lay.data)}
        for i in range(-1, dx):
            for j in range(-1, dz):
                kind = "X" if (i + j) % 2 == 0 else "Z"
                top_bottom = i in (-1, dx - 1)
                left_right = j in (-1, dz - 1)
                if top_bottom and left_right:
                    continue
                if top_bottom and kind != "X":
                    continue
                if left_right and kind != "Z":
                    continue
                order = X_ORDER if kind == "X" else Z_ORDER
                sched = tuple(index.get((i + dr, j + dc)) for dr, dc in order)
                lay.plaquettes.append(Plaquette(kind, (i + 0.5, j + 0.5), sched))
        return lay

    @property
    def num_data(self) -> int:
        return len(self.data)

    def ancilla(self, k: int) -> int:
        return self.num_data + k

    def logical_support(self, kind: str) -> tuple[int, ...]:
        """Z logical: top row; X logical: left column."""
        dz = self.dims.d_Z
        if kind == "Z":
            return tuple(range(dz))
        return tuple(r * dz for r in range(self.dims.d_X))

    def to_json(self) -> str:
        return json.dumps(
            {
                "d_X": self.dims.d_X,
                "d_Z": self.dims.d_Z,
                "data": [list(rc) for rc in self.data],
                "plaquettes": [
                    {
                        "kind": p.kind,
                        "centre": list(p.centre),
                        "ancilla": self.ancilla(k),
                        "schedule": list(p.schedule),
                    }
                    for k, p in enumerate(self.plaquettes)
                ],
                "logical_X": list(self.logical_support("X")),
                "logical_Z": list(self.logical_support("Z")),
                "cnot_order": {"X": ["NW", "NE", "SW", "SE"], "Z": ["NW", "SW", "NE", "SE"]},
            },
            indent=1,
        )


def build_memory_circuit(dims: PatchDims, basis: str = "Z", hadamard_ancillas: bool = True) -> Circuit:
    """Memory experiment: init data in ``basis``, ``dims.rounds`` rounds, measure data in ``basis``.

    Each round is six ticks: ancilla reset, four CNOT layers, ancilla readout.
    Data initialisation shares the first reset tick and the final data readout
    shares the last readout tick.  With ``hadamard_ancillas`` the X checks use
    ``RZ, H`` and ``H, MZ`` instead of ``RX`` and ``MX``, adding two ticks per round.
    """
    if basis not in ("X", "Z"):
        raise ValueError(f"basis must be 'X' or 'Z', got {basis!r}")
    lay = PatchLayout.build(dims)
    c = Circuit(dims.num_qubits)
    prev: list[int] | None = None
    last = dims.rounds - 1
    data_meas = []
    for rnd in range(dims.rounds):
        c.tick()
        for k, p in enumerate(lay.plaquettes):
            c.append("RX" if p.kind == "X" and not hadamard_ancillas else "RZ", lay.ancilla(k))
        if rnd == 0:
            for q in range(lay.num_data):
                c.append("R" + basis, q)
        if hadamard_ancillas:
            _hadamard_x_checks(c, lay)
        for step in range(4):
            c.tick()
            for k, p in enumerate(lay.plaquettes):
                q = p.schedule[step]
                if q is None:
                    continue
                a = lay.ancilla(k)
                c.append(*(("CNOT", a, q) if p.kind == "X" else ("CNOT", q, a)))
        if hadamard_ancillas:
            _hadamard_x_checks(c, lay)
        c.tick()
        cur = [
            c.append("MZ" if hadamard_ancillas else "M" + p.kind, lay.ancilla(k))
            for k, p in enumerate(lay.plaquettes)
        ]
        if rnd == last:
            data_meas = [c.append("M" + basis, q) for q in range(lay.num_data)]
        for k, p in enumerate(lay.plaquettes):
            if prev is None:
                if p.kind == basis:
                    c.add_detector([cur[k]], p.kind)
            else:
                c.add_detector([cur[k], prev[k]], p.kind)
        prev = cur
    for k, p in enumerate(lay.plaquettes):
        if p.kind == basis:
            c.add_detector([prev[k], *(data_meas[q] for q in p.support)], p.kind)
    c.add_observable(0, [data_meas[q] for q in lay.logical_support(basis)])
    return c


def _hadamard_x_checks(c: Circuit, lay: PatchLayout) -> None:
    c.tick()
    for k, p in enumerate(lay.plaquettes):
        if p.kind == "X":
            c.append("H", lay.ancilla(k))


class FaultChannel(NamedTuple):
    site: int
    pauli: str
    probability: float
    detectors: tuple[int, ...]
    observables: tuple[int, ...]


def enumerate_fault_channels(c: Circuit, noise: NoiseModel) -> list[FaultChannel]:
    """Every noise site times every non-identity Pauli with its noiseless signature."""
    sim = FrameSimulator(c)
    faults = []
    for i, s in enumerate(sim.sites):
        for P in ONE_QUBIT_PAULIS if len(s.qubits) == 1 else TWO_QUBIT_PAULIS:
            faults.append((i, P))
    flips = sim.propagate_faults(faults).astype(np.int64)
    det = _group_parity(flips, c.detectors)
    obs = _group_parity(flips, c.observables)
    out = []
    for col, (i, P) in enumerate(faults):
        prob = noise.p / (3 if len(P) == 1 else 15)
        out.append(
            FaultChannel(
                i, P, prob,
                tuple(int(k) for k in np.flatnonzero(det[:, col])),
                tuple(int(k) for k in np.flatnonzero(obs[:, col])),
            )
        )
    return out


def _group_parity(flips: np.ndarray, groups) -> np.ndarray:
    out = np.zeros((len(groups), flips.shape[1]), dtype=np.int64)
    for k, g in enumerate(groups):
        if g:
            out[k] = flips[list(g)].sum(axis=0) % 2
    return out
