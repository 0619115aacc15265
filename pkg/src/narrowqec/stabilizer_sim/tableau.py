"""CHP stabilizer tableau (Aaronson & Gottesman), vectorised over rows with numpy."""
from __future__ import annotations

import numpy as np

from .circuit import Instruction
from .pauli import PauliString, _g


class Tableau:
    """Rows ``0..n-1`` are destabilizers, ``n..2n-1`` stabilizers, row ``2n`` is scratch."""

    def __init__(self, num_qubits: int):
        n = num_qubits
        self.num_qubits = n
        self.x = np.zeros((2 * n + 1, n), dtype=np.uint8)
        self.z = np.zeros((2 * n + 1, n), dtype=np.uint8)
        self.r = np.zeros(2 * n + 1, dtype=np.uint8)
        idx = np.arange(n)
        self.x[idx, idx] = 1
        self.z[n + idx, idx] = 1

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.num_qubits = self.num_qubits
        t.x, t.z, t.r = self.x.copy(), self.z.copy(), self.r.copy()
        return t

    def _check(self, *qubits):
        for q in qubits:
            if not 0 <= q < self.num_qubits:
                raise IndexError(f"qubit {q} out of range for {self.num_qubits} qubits")

    # -- Clifford gates -----------------------------------------------------
    def h(self, a: int) -> None:
        self._check(a)
        self.r ^= self.x[:, a] & self.z[:, a]
        self.x[:, a], self.z[:, a] = self.z[:, a].copy(), self.x[:, a].copy()

    def s(self, a: int) -> None:
        self._check(a)
        self.r ^= self.x[:, a] & self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def cnot(self, a: int, b: int) -> None:
        self._check(a, b)
        if a == b:
            raise ValueError("CNOT control equals target")
        x, z = self.x, self.z
        self.r ^= x[:, a] & z[:, b] & (x[:, b] ^ z[:, a] ^ 1)
        x[:, b] ^= x[:, a]
        z[:, a] ^= z[:, b]

    def cz(self, a: int, b: int) -> None:
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    def apply_pauli(self, pauli: PauliString | str, qubits=None) -> None:
        """Conjugate by a Pauli: flips the sign of every row it anticommutes with."""
        if isinstance(pauli, str):
            pauli = PauliString.from_str(pauli)
        if qubits is None:
            qubits = range(pauli.num_qubits)
        qubits = list(qubits)
        self._check(*qubits)
        px, pz = pauli.x_bits, pauli.z_bits
        anti = (self.x[:, qubits] @ pz + self.z[:, qubits] @ px) & 1
        self.r ^= anti.astype(np.uint8)

    # -- measurement ----------------------------------------------------------
    def _rowsum(self, h: int, i: int) -> None:
        g = _g(self.x[i], self.z[i], self.x[h], self.z[h])
        total = 2 * int(self.r[h]) + 2 * int(self.r[i]) + int(g.sum())
        self.r[h] = (total % 4) // 2
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def _rowsum_many(self, hs: np.ndarray, i: int) -> None:
        if not len(hs):
            return
        g = _g(self.x[i][None, :], self.z[i][None, :], self.x[hs], self.z[hs]).sum(axis=1)
        total = 2 * self.r[hs].astype(np.int64) + 2 * int(self.r[i]) + g
        self.r[hs] = ((total % 4) // 2).astype(np.uint8)
        self.x[hs] ^= self.x[i]
        self.z[hs] ^= self.z[i]

    def measure_z(self, a: int, rng: np.random.Generator | None = None, forced: int | None = None):
        """Return ``(outcome, deterministic)``; ``forced`` pins a random outcome."""
        self._check(a)
        n = self.num_qubits
        stab_x = np.flatnonzero(self.x[n : 2 * n, a])
        if len(stab_x):
            p = n + int(stab_x[0])
            others = np.flatnonzero(self.x[: 2 * n, a])
            others = others[others != p]
            self._rowsum_many(others, p)
            self.x[p - n], self.z[p - n], self.r[p - n] = self.x[p], self.z[p], self.r[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, a] = 1
            if forced is None:
                forced = int(rng.integers(2)) if rng is not None else 0
            self.r[p] = forced & 1
            return int(self.r[p]), False
        s = 2 * n
        self.x[s] = 0
        self.z[s] = 0
        self.r[s] = 0
        for i in np.flatnonzero(self.x[:n, a]):
            self._rowsum(s, int(i) + n)
        return int(self.r[s]), True

    def measure(self, a: int, basis: str = "Z", rng=None, forced=None):
        if basis == "Z":
            return self.measure_z(a, rng, forced)
        if basis == "X":
            self.h(a)
            out = self.measure_z(a, rng, forced)
            self.h(a)
            return out
        raise ValueError(f"basis must be 'X' or 'Z', got {basis!r}")

    def reset(self, a: int, basis: str = "Z", rng=None) -> None:
        outcome, _ = self.measure(a, basis, rng)
        if outcome:
            self.apply_pauli("Z" if basis == "X" else "X", [a])

    # -- inspection -----------------------------------------------------------
    def row(self, i: int) -> PauliString:
        return PauliString(self.x[i], self.z[i], -1 if self.r[i] else 1)

    def stabilizers(self) -> list[PauliString]:
        n = self.num_qubits
        return [self.row(i) for i in range(n, 2 * n)]

    def destabilizers(self) -> list[PauliString]:
        return [self.row(i) for i in range(self.num_qubits)]

    def commutation_matrix(self) -> np.ndarray:
        """Symplectic inner products of all 2n rows (mod 2)."""
        n = self.num_qubits
        x = self.x[: 2 * n].astype(np.int64)
        z = self.z[: 2 * n].astype(np.int64)
        return (x @ z.T + z @ x.T) % 2

    def expectation_sign(self, pauli: PauliString) -> int | None:
        """+1/-1 if ``pauli`` (up to sign) lies in the stabilizer group, else ``None``."""
        t = self.copy()
        n = self.num_qubits
        anti = (t.x[:n] @ pauli.z_bits + t.z[:n] @ pauli.x_bits) % 2
        stab_anti = (t.x[n:2 * n] @ pauli.z_bits + t.z[n:2 * n] @ pauli.x_bits) % 2
        if stab_anti.any():
            return None
        s = 2 * n
        t.x[s] = 0
        t.z[s] = 0
        t.r[s] = 0
        for i in np.flatnonzero(anti):
            t._rowsum(s, int(i) + n)
        sign = -1 if t.r[s] else 1
        return sign if pauli.sign == 1 else -sign

    def apply(self, ins: Instruction, rng=None):
        """Apply one circuit instruction; returns the outcome for measurements."""
        name, targets = ins
        if name == "H":
            self.h(*targets)
        elif name == "S":
            self.s(*targets)
        elif name == "CNOT":
            self.cnot(*targets)
        elif name == "CZ":
            self.cz(*targets)
        elif name == "RZ":
            self.reset(targets[0], "Z", rng)
        elif name == "RX":
            self.reset(targets[0], "X", rng)
        elif name == "MZ":
            return self.measure(targets[0], "Z", rng)[0]
        elif name == "MX":
            return self.measure(targets[0], "X", rng)[0]
        else:
            raise ValueError(f"unknown instruction {name!r}")
        return None


def apply_gate(t: Tableau, gate: Instruction) -> Tableau:
    """Apply a unitary Clifford instruction in place and return the tableau."""
    if gate.name not in ("H", "S", "CNOT", "CZ"):
        raise ValueError(f"{gate.name} is not a unitary gate")
    t.apply(gate)
    return t


def measure(t: Tableau, q: int, basis: str, rng: np.random.Generator):
    return t.measure(q, basis, rng)


