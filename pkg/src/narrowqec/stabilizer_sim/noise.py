"""Depolarizing channels sampled as Pauli insertions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# index -> (x, z) for I, X, Y, Z
PAULI_XZ = ((0, 0), (1, 0), (1, 1), (0, 1))
PAULI_LETTERS = "IXYZ"

ONE_QUBIT_PAULIS = ("X", "Y", "Z")
TWO_QUBIT_PAULIS = tuple(
    a + b for a in PAULI_LETTERS for b in PAULI_LETTERS if a + b != "II"
)


@dataclass(frozen=True)
class NoiseModel:
    """Uniform depolarizing strength ``p`` for every one- and two-qubit location."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    def channel(self, arity: int) -> dict[str, float]:
        """The Pauli distribution of the 1- or 2-qubit channel (identity included)."""
        paulis = ONE_QUBIT_PAULIS if arity == 1 else TWO_QUBIT_PAULIS
        dist = {"I" * arity: 1.0 - self.p}
        dist.update({P: self.p / len(paulis) for P in paulis})
        return dist

    def sample(self, arity: int, rng: np.random.Generator) -> str | None:
        """Draw one Pauli for a channel of the given arity; ``None`` means identity."""
        if self.p == 0.0 or rng.random() >= self.p:
            return None
        paulis = ONE_QUBIT_PAULIS if arity == 1 else TWO_QUBIT_PAULIS
        return paulis[int(rng.integers(len(paulis)))]

    def sample_many(self, arity: int, size: int, rng: np.random.Generator) -> np.ndarray:
        """Vectorised draw; returns Pauli indices (0 = identity, otherwise 1-based into the list)."""
        n = 3 if arity == 1 else 15
        hit = rng.random(size) < self.p
        out = np.zeros(size, dtype=np.int64)
        out[hit] = rng.integers(1, n + 1, size=int(hit.sum()))
        return out


def pauli_bits(label: str) -> list[tuple[int, int]]:
    """Per-qubit (x, z) pairs of a Pauli label like ``"XZ"``."""
    return [PAULI_XZ[PAULI_LETTERS.index(c)] for c in label]
