"""Flagged extraction passes, the adaptive fault-tolerant round, and a bitmask frame engine.

A *pass* measures one X/Z check pair with the code's template.  A *set* is
one pass per pair.  A *round* is two or three sets for [[7,1,3]] (a third
only when the first two disagree) and one or two for [[15,7,3]] (a second
only when the first is not all zero).

Pauli frames are Python ints: bit q of ``x``/``z`` is the X/Z component on
qubit q.  Data qubits are ``0..n-1``, ancillas follow in template order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..stabilizer_sim.circuit import Circuit
from ..stabilizer_sim.noise import PAULI_XZ, NoiseModel
from .codes import BlockCode, get_code

# op codes
SITE1, SITE2, CX, CZ, RESET, MEAS = range(6)


@dataclass(frozen=True)
class BlockSimConfig:
    """Modelling knobs for block-level simulation.

    ``ancilla_noise`` adds channels after ancilla preparation and before
    readout; ``measure_idle`` charges data idling during the readout and
    preparation ticks; ``schedule`` is ``"parallel"`` (ASAP layers) or
    ``"sequential"`` (one gate per tick).
    """

    ancilla_noise: bool = False
    measure_idle: bool = True
    schedule: str = "parallel"

    def __post_init__(self):
        if self.schedule not in ("parallel", "sequential"):
            raise ValueError(f"unknown schedule {self.schedule!r}")


def asap_layers(gates: list[tuple]) -> list[list[tuple]]:
    """Greedy earliest-layer placement that keeps the per-qubit gate order."""
    layers: list[list[tuple]] = []
    ready: dict = {}
    for g in gates:
        qs = g[1:]
        at = max((ready.get(q, 0) for q in qs), default=0)
        while len(layers) <= at:
            layers.append([])
        layers[at].append(g)
        for q in qs:
            ready[q] = at + 1
    return layers


@dataclass
class Site:
    """A noise location; ``kind`` is init, idle, meas or gate."""

    qubits: tuple[int, ...]
    kind: str
    pass_index: int
    tick: int


@dataclass
class CompiledSet:
    ops: list[tuple]
    sites: list[Site]
    num_bits: int
    ticks: int


class ExtractionRound:
    """One code's extraction set, compiled, with the adaptive round protocol."""

    def __init__(self, code: BlockCode | str, config: BlockSimConfig | None = None, noise: NoiseModel | None = None):
        self.code = get_code(code) if isinstance(code, str) else code
        self.config = config or BlockSimConfig()
        self.noise = noise or NoiseModel(0.0)
        c = self.code
        self.anc = {name: c.n + i for i, name in enumerate(c.ancillas)}
        self.num_qubits = c.n + len(c.ancillas)
        self.data_mask = (1 << c.n) - 1
        self.has_flag = "f" in self.anc
        # every location, for decoder tables
        self.full = self._compile(all_sites=True)
        # only the locations that the noise model charges
        self.noisy = self._compile(all_sites=False)

    # -- compilation ------------------------------------------------------------
    def pass_gates(self, k: int) -> list[tuple]:
        """Template gates of pass k with wires mapped onto the k-th pair's support."""
        c = self.code
        wire = dict(zip(c.template_wires, c.pair_support(k)))
        res = lambda w: self.anc[w] if isinstance(w, str) else wire[w]
        return [(kind, res(u), res(v)) for kind, u, v in c.template]

    def pass_layers(self, k: int) -> list[list[tuple]]:
        gates = self.pass_gates(k)
        if self.config.schedule == "sequential":
            return [[g] for g in gates]
        return asap_layers(gates)

    def _compile(self, all_sites: bool) -> CompiledSet:
        c, cfg = self.code, self.config
        ops: list[tuple] = []
        sites: list[Site] = []
        tick = 0
        anc = list(self.anc.values())
        data = list(range(c.n))

        def site(qs, kind, k):
            ops.append((SITE1 if len(qs) == 1 else SITE2, len(sites), *qs))
            sites.append(Site(tuple(qs), kind, k, tick))

        for k in range(c.num_pairs):
            # preparation tick
            if cfg.measure_idle or all_sites:
                for q in data:
                    site((q,), "idle", k)
            for name, q in self.anc.items():
                ops.append((RESET, q, "Z" if name == "a" else "X"))
            if cfg.ancilla_noise or all_sites:
                for q in anc:
                    site((q,), "init", k)
            tick += 1
            for layer in self.pass_layers(k):
                busy = set()
                for g in layer:
                    site(g[1:], "gate", k)
                    busy.update(g[1:])
                for q in range(self.num_qubits):
                    if q not in busy:
                        site((q,), "idle", k)
                for kind, u, v in layer:
                    ops.append((CX if kind == "CX" else CZ, u, v))
                tick += 1
            # readout tick
            if cfg.ancilla_noise or all_sites:
                for q in anc:
                    site((q,), "meas", k)
            if cfg.measure_idle or all_sites:
                for q in data:
                    site((q,), "idle", k)
            ops.append((MEAS, self.anc["b"], "X", 2 * k))
            ops.append((MEAS, self.anc["a"], "Z", 2 * k + 1))
            if self.has_flag:
                ops.append((MEAS, self.anc["f"], "X", 2 * c.num_pairs + k))
            tick += 1
        bits = 2 * c.num_pairs + (c.num_pairs if self.has_flag else 0)
        return CompiledSet(ops, sites, bits, tick)

    @property
    def ticks_per_set(self) -> int:
        return self.noisy.ticks

    def bus_latency(self) -> int:
        """Bus cycles per set: every pass costs its CNOT depth plus preparation and readout."""
        return sum(len(self.pass_layers(k)) + 2 for k in range(self.code.num_pairs))

    # -- execution ------------------------------------------------------------------
    @staticmethod
    def run_set(cs: CompiledSet, x: int, z: int, faults: dict[int, tuple[int, int]] | None = None):
        """Propagate a frame through one set; ``faults`` maps site index -> (x mask, z mask)."""
        bits = 0
        faults = faults or {}
        for op in cs.ops:
            code = op[0]
            if code <= SITE2:
                hit = faults.get(op[1])
                if hit is not None:
                    x ^= hit[0]
                    z ^= hit[1]
            elif code == CX:
                _, a, b = op
                if (x >> a) & 1:
                    x ^= 1 << b
                if (z >> b) & 1:
                    z ^= 1 << a
            elif code == CZ:
                _, a, b = op
                if (x >> b) & 1:
                    z ^= 1 << a
                if (x >> a) & 1:
                    z ^= 1 << b
            elif code == RESET:
                clear = ~(1 << op[1])
                x &= clear
                z &= clear
            else:
                _, q, basis, bit = op
                flipped = (x >> q) & 1 if basis == "Z" else (z >> q) & 1
                bits |= flipped << bit
        return x, z, bits

    def needs_more(self, history: list[int]) -> bool:
        """Adaptive protocol: whether another set is run after ``history``."""
        lo, hi = self.code.sets
        if len(history) >= hi:
            return False
        if len(history) < lo:
            return True
        if self.code.name == "steane713":
            return history[0] != history[1]
        return history[0] != 0

    def run_round(self, cs: CompiledSet, x: int, z: int, fault_source: Callable[[int], dict] | None = None):
        """Run sets until the protocol stops; ``fault_source(set_index)`` supplies faults per set."""
        history: list[int] = []
        while not history or self.needs_more(history):
            faults = fault_source(len(history)) if fault_source else None
            x, z, bits = self.run_set(cs, x, z, faults)
            history.append(bits)
        # ancillas are re-prepared every pass; drop their leftover frame
        return x & self.data_mask, z & self.data_mask, tuple(history)

    def key(self, history: tuple[int, ...]) -> str:
        """Hex key of a syndrome history: total bit count, colon, value."""
        nb = self.noisy.num_bits
        value = 0
        for i, h in enumerate(history):
            value |= h << (i * nb)
        return f"{nb * len(history)}:{value:x}"

    # -- static circuit view ---------------------------------------------------------
    def as_circuit(self, num_sets: int | None = None) -> Circuit:
        """Fault-free gate sequence of ``num_sets`` sets in the Circuit IR."""
        num_sets = num_sets or self.code.sets[0]
        circ = Circuit(self.num_qubits)
        for _ in range(num_sets):
            for k in range(self.code.num_pairs):
                circ.tick()
                for name, q in self.anc.items():
                    circ.append("RZ" if name == "a" else "RX", q)
                for layer in self.pass_layers(k):
                    circ.tick()
                    for kind, u, v in layer:
                        circ.append("CNOT" if kind == "CX" else "CZ", u, v)
                circ.tick()
                circ.append("MX", self.anc["b"])
                circ.append("MZ", self.anc["a"])
                if self.has_flag:
                    circ.append("MX", self.anc["f"])
        return circ


def pauli_masks(label_index: int, qubits: tuple[int, ...]) -> tuple[int, int]:
    """Masks of a 1- or 2-qubit Pauli given by its index (1..3 or 1..15, I=0 X=1 Y=2 Z=3 per qubit)."""
    if len(qubits) == 1:
        letters = (label_index,)
    else:
        letters = (label_index // 4, label_index % 4)
    x = z = 0
    for q, L in zip(qubits, letters):
        px, pz = PAULI_XZ[L]
        x |= px << q
        z |= pz << q
    return x, z


def build_extraction_round(code: BlockCode | str, noise: NoiseModel | None = None, config: BlockSimConfig | None = None) -> ExtractionRound:
    return ExtractionRound(code, config, noise)
