"""Stabilizer tables and flag-extraction templates of the two distance-3 block codes."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..stabilizer_sim.pauli import PauliString

STEANE_STABILIZERS = (
    "IIIXXXX",
    "IIIZZZZ",
    "IXXIIXX",
    "IZZIIZZ",
    "XIXIXIX",
    "ZIZIZIZ",
)

CSS1573_STABILIZERS = (
    "IIIIIIIXXXXXXXX",
    "IIIIIIIZZZZZZZZ",
    "IIIXXXXIIIIXXXX",
    "IIIZZZZIIIIZZZZ",
    "IXXIIXXIIXXIIXX",
    "IZZIIZZIIZZIIZZ",
    "XIXIXIXIXIXIXIX",
    "ZIZIZIZIZIZIZIZ",
)

# Gate columns of the one-pass templates.  Data wires are named by their
# figure labels; "a" is the |0> Z-syndrome ancilla, "b" the |+> X-syndrome
# ancilla and "f" the |+> flag.  ("CX", c, t) is a CNOT, ("CZ", u, v) a CZ.
STEANE_TEMPLATE = (
    ("CX", 6, "a"),
    ("CX", "b", 4),
    ("CX", 4, "a"),
    ("CX", "b", 6),
    ("CX", 5, "a"),
    ("CX", "b", 7),
    ("CX", 7, "a"),
    ("CX", "b", 5),
)
STEANE_WIRES = (4, 5, 6, 7)

CSS1573_TEMPLATE = (
    ("CX", 15, "a"),
    ("CX", "b", 8),
    ("CX", "f", "a"),
    ("CX", 13, "a"),
    ("CZ", "b", "f"),
    ("CX", "b", 9),
    ("CX", 14, "a"),
    ("CX", "b", 12),
    ("CX", 11, "a"),
    ("CX", "b", 10),
    ("CX", 12, "a"),
    ("CX", "b", 14),
    ("CX", 10, "a"),
    ("CX", "b", 11),
    ("CX", 9, "a"),
    ("CX", "b", 13),
    ("CX", "f", "a"),
    ("CX", 8, "a"),
    ("CZ", "b", "f"),
    ("CX", "b", 15),
)
CSS1573_WIRES = (8, 9, 10, 11, 12, 13, 14, 15)


@dataclass(frozen=True)
class BlockCode:
    """A self-dual CSS code of distance 3 whose checks come in (X, Z) pairs on equal supports."""

    name: str
    n: int
    k: int
    d: int
    stabilizer_strings: tuple[str, ...]
    template: tuple
    template_wires: tuple[int, ...]
    ancillas: tuple[str, ...]
    # number of full extraction sets: minimum, maximum
    sets: tuple[int, int]

    @cached_property
    def stabilizers(self) -> list[PauliString]:
        return [PauliString.from_str(s) for s in self.stabilizer_strings]

    @property
    def num_pairs(self) -> int:
        return len(self.stabilizer_strings) // 2

    def pair_support(self, k: int) -> tuple[int, ...]:
        """Data qubits (0-based) of the k-th X/Z check pair."""
        return tuple(self.stabilizers[2 * k].support())

    @cached_property
    def check_masks(self) -> tuple[int, ...]:
        """Bitmask of each classical parity check (one per X/Z pair)."""
        return tuple(sum(1 << q for q in self.pair_support(k)) for k in range(self.num_pairs))

    @cached_property
    def parity_matrix(self) -> np.ndarray:
        H = np.zeros((self.num_pairs, self.n), dtype=np.uint8)
        for k in range(self.num_pairs):
            H[k, list(self.pair_support(k))] = 1
        return H

    def syndrome(self, mask: int) -> int:
        """Classical syndrome of a bit pattern, check k -> bit k."""
        return sum(((mask & m).bit_count() & 1) << k for k, m in enumerate(self.check_masks))

    @cached_property
    def leaders(self) -> dict[int, int]:
        """Syndrome -> weight-<=1 bit pattern (the Hamming decoder)."""
        out = {0: 0}
        for q in range(self.n):
            out.setdefault(self.syndrome(1 << q), 1 << q)
        return out

    @cached_property
    def stabilizer_span(self) -> frozenset[int]:
        """All bit patterns generated by the checks (the dual code)."""
        span = {0}
        for m in self.check_masks:
            span |= {s ^ m for s in span}
        return frozenset(span)

    def is_stabilizer(self, mask: int) -> bool:
        return mask in self.stabilizer_span

    def in_normalizer(self, mask: int) -> bool:
        return self.syndrome(mask) == 0

    @cached_property
    def logical_basis(self) -> list[tuple[PauliString, PauliString]]:
        """Pairs (X_L, Z_L) with X_i anticommuting only with Z_i."""
        return symplectic_logicals(self.stabilizers, self.n)

    def reduced_weight(self, mask: int) -> int:
        """Minimum weight of a one-type (all X or all Z) pattern over its stabilizer coset."""
        return min((mask ^ s).bit_count() for s in self.stabilizer_span)


def symplectic_logicals(stabilizers: list[PauliString], n: int) -> list[tuple[PauliString, PauliString]]:
    """Logical operator pairs by symplectic Gram-Schmidt on the normalizer complement."""
    P = PauliString
    stab = [np.concatenate([s.x_bits, s.z_bits]).astype(np.uint8) for s in stabilizers]

    def sp(u, v):
        return int(u[:n] @ v[n:] + u[n:] @ v[:n]) % 2

    def in_span(vecs, v):
        if not vecs:
            return not v.any()
        M = np.array(vecs + [v], dtype=np.uint8)
        return _rank2(M) == _rank2(np.array(vecs, dtype=np.uint8))

    norm_vecs = []
    for v in _normalizer_basis(stab, n):
        if not in_span(stab + norm_vecs, v):
            norm_vecs.append(v)
    pairs = []
    pool = list(norm_vecs)
    while pool:
        a = pool.pop(0)
        partner = next((i for i, b in enumerate(pool) if sp(a, b)), None)
        if partner is None:
            continue
        b = pool.pop(partner)
        pool = [c ^ (sp(c, b) * a) ^ (sp(c, a) * b) for c in pool]
        pairs.append((a, b))
    return [(P(a[:n], a[n:]), P(b[:n], b[n:])) for a, b in pairs]


def _normalizer_basis(stab: list[np.ndarray], n: int) -> list[np.ndarray]:
    """Kernel of the symplectic form against the stabilizers, over GF(2)."""
    A = np.array([np.concatenate([s[n:], s[:n]]) for s in stab], dtype=np.uint8)
    return _nullspace2(A)


def _rank2(M: np.ndarray) -> int:
    M = M.copy() % 2
    r = 0
    rows, cols = M.shape
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i, c]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] ^= M[r]
        r += 1
        if r == rows:
            break
    return r


def _nullspace2(A: np.ndarray) -> list[np.ndarray]:
    A = A.copy() % 2
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] ^= A[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for i, pc in enumerate(pivots):
            if A[i, f]:
                v[pc] = 1
        basis.append(v)
    return basis


STEANE = BlockCode(
    "steane713", 7, 1, 3, STEANE_STABILIZERS, STEANE_TEMPLATE, STEANE_WIRES, ("a", "b"), (2, 3)
)
CSS1573 = BlockCode(
    "css1573", 15, 7, 3, CSS1573_STABILIZERS, CSS1573_TEMPLATE, CSS1573_WIRES, ("a", "b", "f"), (1, 2)
)
CODES = {c.name: c for c in (STEANE, CSS1573)}


def get_code(name: str) -> BlockCode:
    try:
        return CODES[name]
    except KeyError:
        raise ValueError(f"unknown code {name!r}; choose from {sorted(CODES)}") from None
