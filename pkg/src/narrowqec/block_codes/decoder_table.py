"""Exhaustive single-fault decoder tables for flagged extraction rounds."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..stabilizer_sim.pauli import PauliString
from .codes import BlockCode
from .extraction import ExtractionRound, pauli_masks


class DecoderConflict(ValueError):
    """Two faults share a history but no single correction handles both."""


class Fault(NamedTuple):
    set_index: int  # -1 for an error already on the data before the round
    site: int  # site index within the set, or data qubit for input errors
    pauli: int  # 1..3 or 1..15
    kind: str  # init, idle, meas, gate or input


class FaultOutcome(NamedTuple):
    fault: Fault
    history: tuple[int, ...]
    x: int
    z: int


def enumerate_single_faults(er: ExtractionRound) -> list[FaultOutcome]:
    """Every listed single fault propagated through one adaptive round (no other noise)."""
    cs = er.full
    out = []
    n = er.code.n
    for q in range(n):
        for P in (1, 2, 3):
            x, z = pauli_masks(P, (q,))
            rx, rz, hist = er.run_round(cs, x, z)
            out.append(FaultOutcome(Fault(-1, q, P, "input"), hist, rx, rz))
    max_sets = er.code.sets[1]
    for s in range(max_sets):
        for i, site in enumerate(cs.sites):
            for P in range(1, 4 if len(site.qubits) == 1 else 16):
                masks = pauli_masks(P, site.qubits)
                reached = []

                def source(set_index, s=s, i=i, masks=masks):
                    if set_index == s:
                        reached.append(True)
                        return {i: masks}
                    return None

                rx, rz, hist = er.run_round(cs, 0, 0, source)
                if reached:
                    out.append(FaultOutcome(Fault(s, i, P, site.kind), hist, rx, rz))
    return out


class _Lookup:
    """Vectorised membership tests over all 2^n bit patterns."""

    def __init__(self, code: BlockCode):
        n = code.n
        self.n = n
        self.cand = np.arange(1 << n, dtype=np.int64)
        syn = np.zeros(1 << n, dtype=np.int64)
        for k, m in enumerate(code.check_masks):
            syn |= (np.bitwise_count(self.cand & m) & 1).astype(np.int64) << k
        self.syn = syn
        self.in_span = np.zeros(1 << n, dtype=bool)
        self.in_span[list(code.stabilizer_span)] = True
        leader = np.zeros(1 << code.num_pairs, dtype=np.int64)
        for s, m in code.leaders.items():
            leader[s] = m
        self.leader = leader
        self.weight = np.bitwise_count(self.cand).astype(np.int64)

    def exact(self, r):
        return self.in_span[r]

    def benign(self, r):
        return self.in_span[r ^ self.leader[self.syn[r]]]


def _best_correction(residuals: list[int], look: _Lookup) -> int:
    """Minimum-weight pattern c such that every residual ^ c is cancelled or one-step correctable."""
    all_ok = np.ones(len(look.cand), dtype=bool)
    n_exact = np.zeros(len(look.cand), dtype=np.int64)
    for e in set(residuals):
        r = look.cand ^ e
        ex = look.exact(r)
        all_ok &= ex | look.benign(r)
        n_exact += ex
    if not all_ok.any():
        raise DecoderConflict(f"no correction handles residuals {sorted(set(residuals))}")
    # most exact cancellations first, then lowest weight, then smallest pattern
    score = np.where(all_ok, n_exact * (look.n + 1) - look.weight, -1)
    return int(np.flatnonzero(score == score.max())[0])


@dataclass
class DecoderTable:
    code: str
    entries: dict[str, tuple[int, int]] = field(default_factory=dict)
    bits_per_set: int = 0

    def correction(self, key: str) -> tuple[int, int] | None:
        return self.entries.get(key)

    def to_json(self, n: int) -> str:
        body = {k: str(PauliString(_bits(x, n), _bits(z, n))) [1:] for k, (x, z) in sorted(self.entries.items())}
        return json.dumps({"code": self.code, "bits_per_set": self.bits_per_set, "table": body}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "DecoderTable":
        raw = json.loads(text)
        entries = {}
        for k, label in raw["table"].items():
            P = PauliString.from_str(label)
            entries[k] = (_mask(P.x_bits), _mask(P.z_bits))
        return cls(raw["code"], entries, raw["bits_per_set"])


def _bits(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> q) & 1 for q in range(n)], dtype=np.uint8)


def _mask(bits) -> int:
    return sum(int(b) << q for q, b in enumerate(bits))


def generate_decoder_table(er: ExtractionRound) -> DecoderTable:
    """Map every reachable single-fault history to a sound correction."""
    outcomes = enumerate_single_faults(er)
    look = _Lookup(er.code)
    groups: dict[str, list[FaultOutcome]] = defaultdict(list)
    for o in outcomes:
        groups[er.key(o.history)].append(o)
    zero_key = er.key(er.run_round(er.full, 0, 0)[2])
    groups.setdefault(zero_key, [])
    table = DecoderTable(er.code.name, bits_per_set=er.full.num_bits)
    for key, group in groups.items():
        xs = [o.x for o in group] or [0]
        zs = [o.z for o in group] or [0]
        try:
            table.entries[key] = (_best_correction(xs, look), _best_correction(zs, look))
        except DecoderConflict as err:
            faults = ", ".join(str(o.fault) for o in group[:4])
            raise DecoderConflict(f"history {key}: {err} (faults {faults} ...)") from None
    return table


def hamming_fallback(er: ExtractionRound, history: tuple[int, ...]) -> tuple[int, int]:
    """Correction from the last set alone: X-check bits fix Z errors and Z-check bits fix X errors."""
    code = er.code
    last = history[-1]
    sx = sum(((last >> (2 * k + 1)) & 1) << k for k in range(code.num_pairs))
    sz = sum(((last >> (2 * k)) & 1) << k for k in range(code.num_pairs))
    return code.leaders.get(sx, 0), code.leaders.get(sz, 0)


def decode(er: ExtractionRound, table: DecoderTable, history: tuple[int, ...]) -> tuple[int, int]:
    hit = table.correction(er.key(history))
    return hit if hit is not None else hamming_fallback(er, history)


def residual_class(code: BlockCode, x: int, z: int) -> str:
    """'clean' (stabilizer), 'benign' (one-step correctable, no logical), or 'logical'."""
    if code.is_stabilizer(x) and code.is_stabilizer(z):
        return "clean"
    lx = x ^ code.leaders.get(code.syndrome(x), 0)
    lz = z ^ code.leaders.get(code.syndrome(z), 0)
    if code.is_stabilizer(lx) and code.is_stabilizer(lz):
        return "benign"
    return "logical"


@dataclass
class SoundnessReport:
    faults: int
    failures: list[FaultOutcome]
    flag_violations: list[FaultOutcome]

    @property
    def ok(self) -> bool:
        return not self.failures and not self.flag_violations


def check_table(er: ExtractionRound, table: DecoderTable) -> SoundnessReport:
    """Decode every single fault; also check that gate faults leaving two same-type data errors leave a trace.

    X and Z parts are decoded independently, so a weight-2 Pauli such as
    X_i Z_j is two weight-1 problems and needs no flag.
    """
    failures, flags = [], []
    outcomes = enumerate_single_faults(er)
    for o in outcomes:
        cx, cz = decode(er, table, o.history)
        if residual_class(er.code, o.x ^ cx, o.z ^ cz) == "logical":
            failures.append(o)
        heavy = max(er.code.reduced_weight(o.x), er.code.reduced_weight(o.z)) >= 2
        if o.fault.kind == "gate" and heavy and not any(o.history):
            flags.append(o)
    return SoundnessReport(len(outcomes), failures, flags)
