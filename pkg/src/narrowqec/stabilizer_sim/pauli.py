"""Symplectic Pauli strings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PHASES = {1: "+", -1: "-", 1j: "+i", -1j: "-i"}
_PHASE_FROM_PREFIX = {"+": 1, "-": -1, "+i": 1j, "-i": -1j, "i": 1j, "": 1}


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli operator ``sign * prod_q X^x[q] Z^z[q]`` written in the
    Y-convention: a qubit with both bits set carries ``Y``, not ``XZ``.
    """

    x_bits: np.ndarray
    z_bits: np.ndarray
    sign: complex = 1

    def __post_init__(self):
        x = np.asarray(self.x_bits, dtype=np.uint8) & 1
        z = np.asarray(self.z_bits, dtype=np.uint8) & 1
        if x.shape != z.shape or x.ndim != 1:
            raise ValueError("x_bits and z_bits must be 1-d and equally long")
        if self.sign not in _PHASES:
            raise ValueError(f"sign must be one of +1, -1, +i, -i; got {self.sign!r}")
        object.__setattr__(self, "x_bits", x)
        object.__setattr__(self, "z_bits", z)

    @property
    def num_qubits(self) -> int:
        return len(self.x_bits)

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        """Parse strings such as ``"IIIXXXX"``, ``"-ZZ_"`` or ``"+iXY"``."""
        text = text.strip()
        body = text.lstrip("+-i")
        prefix = text[: len(text) - len(body)]
        if prefix not in _PHASE_FROM_PREFIX:
            raise ValueError(f"bad phase prefix {prefix!r}")
        x = np.array([c in "XY" for c in body], dtype=np.uint8)
        z = np.array([c in "ZY" for c in body], dtype=np.uint8)
        if any(c not in "IXYZ_" for c in body):
            raise ValueError(f"bad Pauli string {text!r}")
        return cls(x, z, _PHASE_FROM_PREFIX[prefix])

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    def __str__(self) -> str:
        letters = "".join("IXZY"[x + 2 * z] for x, z in zip(self.x_bits, self.z_bits))
        return _PHASES[self.sign] + letters

    def weight(self) -> int:
        return int(np.count_nonzero(self.x_bits | self.z_bits))

    def commutes(self, other: "PauliString") -> bool:
        return not (int(self.x_bits @ other.z_bits) + int(self.z_bits @ other.x_bits)) % 2

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.num_qubits != other.num_qubits:
            raise ValueError("qubit count mismatch")
        # i^(sum of per-qubit phase exponents) from the Y-convention product rule
        exponent = int(np.sum(_g(self.x_bits, self.z_bits, other.x_bits, other.z_bits)))
        phase = self.sign * other.sign * (1j ** (exponent % 4))
        return PauliString(self.x_bits ^ other.x_bits, self.z_bits ^ other.z_bits, _snap(phase))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.sign == other.sign
            and np.array_equal(self.x_bits, other.x_bits)
            and np.array_equal(self.z_bits, other.z_bits)
        )

    def __hash__(self):
        return hash((str(self),))

    def support(self) -> list[int]:
        return [int(q) for q in np.flatnonzero(self.x_bits | self.z_bits)]


def _g(x1, z1, x2, z2):
    """Exponent of i picked up per qubit when multiplying P1 * P2 (Aaronson-Gottesman g)."""
    x1 = x1.astype(np.int64)
    z1 = z1.astype(np.int64)
    x2 = x2.astype(np.int64)
    z2 = z2.astype(np.int64)
    return np.where(
        (x1 == 0) & (z1 == 0),
        0,
        np.where(
            (x1 == 1) & (z1 == 1),
            z2 - x2,
            np.where(x1 == 1, z2 * (2 * x2 - 1), x2 * (1 - 2 * z2)),
        ),
    )


def _snap(phase: complex) -> complex:
    for candidate in (1, -1, 1j, -1j):
        if abs(phase - candidate) < 1e-9:
            return candidate
    raise AssertionError(phase)
