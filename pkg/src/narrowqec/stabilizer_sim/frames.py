"""Packed Pauli-frame propagation.

Each column of the frame is an independent Pauli-frame copy of the circuit:
either one deterministic fault (for signature enumeration) or one Monte Carlo
shot.  Columns are packed 64 per ``uint64`` word, so every gate is a handful of
word-parallel XORs over all columns at once.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Sequence

import numpy as np

from .circuit import MEASUREMENTS, RESETS, Circuit, NoiseSite
from .noise import PAULI_LETTERS, TWO_QUBIT_PAULIS, NoiseModel


def num_words(columns: int) -> int:
    return (columns + 63) // 64


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a (rows, columns) 0/1 array into (rows, words) uint64, column j -> bit j%64 of word j//64."""
    bits = np.asarray(bits, dtype=np.uint8)
    rows, cols = bits.shape
    padded = np.zeros((rows, num_words(cols) * 64), dtype=np.uint8)
    padded[:, :cols] = bits
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64)


def unpack_bits(words: np.ndarray, columns: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    raw = np.unpackbits(words.view(np.uint8), axis=-1, bitorder="little")
    return raw[..., :columns]


class FrameSimulator:
    """Propagates packed Pauli frames through a circuit without noise of its own.

    Faults are supplied per noise-site index as a mapping
    ``site -> list of (column, pauli label)``; the frame records, for every
    measurement, which columns see a flipped outcome.
    """

    def __init__(self, circuit: Circuit):
        self.circuit = circuit
        self.sites = circuit.noise_sites()
        self._sites_by_tick: dict[tuple[int, str], list[int]] = defaultdict(list)
        for i, s in enumerate(self.sites):
            self._sites_by_tick[(s.tick, s.when)].append(i)

    def run(self, columns: int, inject) -> np.ndarray:
        """Propagate ``columns`` frames; ``inject(site_index, site, x, z)`` may XOR bits in.

        Returns the packed measurement-flip matrix of shape (num_measurements, words).
        """
        c = self.circuit
        w = num_words(columns)
        x = np.zeros((c.num_qubits, w), dtype=np.uint64)
        z = np.zeros((c.num_qubits, w), dtype=np.uint64)
        flips = np.zeros((c.num_measurements, w), dtype=np.uint64)
        m = 0
        for t, layer in enumerate(c.timesteps):
            for i in self._sites_by_tick.get((t, "before"), ()):
                inject(i, self.sites[i], x, z)
            for name, targets in layer:
                if name == "H":
                    (a,) = targets
                    x[a], z[a] = z[a].copy(), x[a].copy()
                elif name == "S":
                    (a,) = targets
                    z[a] ^= x[a]
                elif name == "CNOT":
                    a, b = targets
                    x[b] ^= x[a]
                    z[a] ^= z[b]
                elif name == "CZ":
                    a, b = targets
                    z[a] ^= x[b]
                    z[b] ^= x[a]
                elif name in RESETS:
                    (a,) = targets
                    x[a] = 0
                    z[a] = 0
                elif name in MEASUREMENTS:
                    (a,) = targets
                    flips[m] = x[a] if name == "MZ" else z[a]
                    m += 1
            for i in self._sites_by_tick.get((t, "after"), ()):
                inject(i, self.sites[i], x, z)
        return flips

    def propagate_faults(self, faults: Sequence[tuple[int, str]]) -> np.ndarray:
        """One column per ``(site_index, pauli_label)`` fault; returns the unpacked flip matrix."""
        by_site: dict[int, list[tuple[int, str]]] = defaultdict(list)
        for col, (site, label) in enumerate(faults):
            by_site[site].append((col, label))

        def inject(i, site, x, z):
            for col, label in by_site.get(i, ()):
                word, bit = divmod(col, 64)
                mask = np.uint64(1) << np.uint64(bit)
                for q, letter in zip(site.qubits, label):
                    if letter in "XY":
                        x[q, word] ^= mask
                    if letter in "ZY":
                        z[q, word] ^= mask

        return unpack_bits(self.run(len(faults), inject), len(faults))

    def sample(self, noise: NoiseModel, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Monte Carlo: one column per shot with faults drawn at every site; returns packed flips."""
        w = num_words(shots)

        def inject(i, site, x, z):
            hits = rng.binomial(shots, noise.p) if noise.p > 0 else 0
            if not hits:
                return
            cols = rng.choice(shots, size=hits, replace=False)
            if len(site.qubits) == 1:
                paulis = [PAULI_LETTERS[k] for k in rng.integers(1, 4, size=hits)]
            else:
                paulis = [TWO_QUBIT_PAULIS[k] for k in rng.integers(0, 15, size=hits)]
            for q_pos, q in enumerate(site.qubits):
                xs = [c for c, P in zip(cols, paulis) if P[q_pos] in "XY"]
                zs = [c for c, P in zip(cols, paulis) if P[q_pos] in "ZY"]
                _xor_columns(x[q], xs)
                _xor_columns(z[q], zs)

        return self.run(shots, inject)


def _xor_columns(row: np.ndarray, cols: Iterable[int]) -> None:
    cols = np.asarray(list(cols), dtype=np.int64)
    if not len(cols):
        return
    masks = np.left_shift(np.uint64(1), (cols % 64).astype(np.uint64))
    np.bitwise_xor.at(row, cols // 64, masks)


def parities(flips: np.ndarray, groups: Sequence[Sequence[int]]) -> np.ndarray:
    """XOR of the rows named by each group (works on packed or unpacked matrices)."""
    out = np.zeros((len(groups), flips.shape[1]), dtype=flips.dtype)
    for k, g in enumerate(groups):
        for m in g:
            out[k] ^= flips[m]
    return out
