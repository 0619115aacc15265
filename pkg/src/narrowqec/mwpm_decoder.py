"""Circuit-level minimum-weight perfect matching.

Fault channels become edges of a detector graph (one graph per CSS sector,
plus a shared boundary node).  Decoding pairs up fired detectors, or sends
them to the boundary, along shortest paths.  Small event sets are solved by
an exact bitmask recursion; larger ones go to the networkx blossom matcher.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .montecarlo_stats import posterior_estimate
from .stabilizer_sim.circuit import Circuit
from .stabilizer_sim.noise import NoiseModel
from .stabilizer_sim.rng import stream
from .surface_code import FaultChannel, PatchDims, build_memory_circuit, enumerate_fault_channels

# above this many events the exponential recursion hands over to blossom
EXACT_DP_LIMIT = 12
_INT_SCALE = 10**7


class HyperedgeError(ValueError):
    """A single fault fired more than two detectors of one sector."""


def xor_prob(p1: float, p2: float) -> float:
    return p1 * (1 - p2) + p2 * (1 - p1)


class Matching(NamedTuple):
    pairs: tuple[tuple[int, int], ...]  # detector ids; boundary is -1
    weight: float
    prediction: int  # observable bitmask


@dataclass
class DetectorGraph:
    """Nodes are the sector's detectors (global ids) plus a boundary node."""

    detectors: list[int]
    edges: dict[tuple[int, int], tuple[float, int]] = field(default_factory=dict)
    BOUNDARY = -1

    def __post_init__(self):
        self._local = {d: i for i, d in enumerate(self.detectors)}
        self._dist = None

    def add(self, u: int, v: int, p: float, obs_mask: int) -> None:
        key = (min(u, v), max(u, v)) if u != self.BOUNDARY and v != self.BOUNDARY else (max(u, v), self.BOUNDARY)
        if key in self.edges:
            p0, m0 = self.edges[key]
            if m0 != obs_mask:
                # equal-signature channels flipping different observables: keep the likelier label
                obs_mask = m0 if p0 >= p else obs_mask
            p = xor_prob(p0, p)
        self.edges[key] = (p, obs_mask)
        self._dist = None

    def weight(self, key) -> float:
        p = self.edges[key][0]
        return -math.log(p) if p < 0.5 else 0.0

    def degree(self, node: int) -> int:
        return sum(node in e for e in self.edges)

    # -- shortest paths -----------------------------------------------------
    def _prepare(self):
        if self._dist is not None:
            return
        n = len(self.detectors) + 1
        b = n - 1
        loc = lambda u: b if u == self.BOUNDARY else self._local[u]
        rows, cols, w = [], [], []
        for key, (p, _) in self.edges.items():
            if p <= 0:
                continue
            u, v = loc(key[0]), loc(key[1])
            wt = max(self.weight(key), 1e-12)
            rows += [u, v]
            cols += [v, u]
            w += [wt, wt]
        mat = csr_matrix((w, (rows, cols)), shape=(n, n))
        dist, pred = dijkstra(mat, directed=False, return_predecessors=True)
        masks = {(loc(k[0]), loc(k[1])): m for k, (_, m) in self.edges.items()}
        masks.update({(v, u): m for (u, v), m in list(masks.items())})
        par = np.zeros((n, n), dtype=np.int64)
        for s in range(n):
            order = np.argsort(dist[s])
            for v in order:
                u = pred[s, v]
                if u >= 0:
                    par[s, v] = par[s, u] ^ masks[(u, v)]
        self._dist, self._par, self._b = dist, par, b
        self._cache: dict[tuple[int, ...], Matching] = {}

    # -- decoding -----------------------------------------------------------
    def decode(self, events: Iterable[int]) -> Matching:
        """Minimum-weight matching of the fired detectors (global ids)."""
        self._prepare()
        try:
            loc = tuple(sorted(self._local[e] for e in events))
        except KeyError as err:
            raise ValueError(f"detector {err.args[0]} is not in this graph") from None
        hit = self._cache.get(loc)
        if hit is None:
            hit = self._decode_local(loc)
            if len(self._cache) < 1_000_000:
                self._cache[loc] = hit
        return hit

    def _decode_local(self, ev: tuple[int, ...]) -> Matching:
        if not ev:
            return Matching((), 0.0, 0)
        dist, b = self._dist, self._b
        if len(ev) % 2 and not np.isfinite(dist[list(ev), b]).any():
            raise ValueError("odd number of events but the boundary is unreachable")
        pairs = _exact_pairs(ev, dist, b) if len(ev) <= EXACT_DP_LIMIT else _blossom_pairs(ev, dist, b)
        weight = 0.0
        pred = 0
        out = []
        for u, v in pairs:
            weight += dist[u, v]
            pred ^= int(self._par[u, v])
            gu = self.detectors[u]
            gv = self.BOUNDARY if v == b else self.detectors[v]
            out.append((gu, gv))
        if not math.isfinite(weight):
            raise ValueError("events cannot be matched")
        return Matching(tuple(out), float(weight), pred)

    # -- persistence --------------------------------------------------------
    def to_json(self) -> str:
        return json.dumps(
            {
                "detectors": self.detectors,
                "edges": [[u, v, p, m] for (u, v), (p, m) in sorted(self.edges.items())],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DetectorGraph":
        raw = json.loads(text)
        g = cls(list(raw["detectors"]))
        for u, v, p, m in raw["edges"]:
            g.edges[(u, v)] = (p, m)
        return g


def _exact_pairs(ev: Sequence[int], dist: np.ndarray, b: int) -> list[tuple[int, int]]:
    """Bitmask recursion: the lowest unmatched event pairs with the boundary or a later event."""
    k = len(ev)
    d = dist[np.ix_(ev, ev)]
    db = dist[list(ev), b]

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[float, tuple]:
        if mask == 0:
            return 0.0, ()
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        cost, choice = best(rest)
        top = (db[i] + cost, ((i, -1),) + choice)
        j_mask = rest
        while j_mask:
            j = (j_mask & -j_mask).bit_length() - 1
            j_mask &= j_mask - 1
            cost, choice = best(rest & ~(1 << j))
            total = d[i, j] + cost
            if total < top[0]:
                top = (total, ((i, j),) + choice)
        return top

    _, choice = best((1 << k) - 1)
    return [(ev[i], b if j < 0 else ev[j]) for i, j in choice]


def _blossom_pairs(ev: Sequence[int], dist: np.ndarray, b: int) -> list[tuple[int, int]]:
    """Events plus one boundary twin each; twins pair among themselves for free."""
    g = nx.Graph()
    k = len(ev)
    finite = dist[np.isfinite(dist)]
    top = int(finite.max() * _INT_SCALE) + 1 if len(finite) else 1
    for i in range(k):
        for j in range(i + 1, k):
            if np.isfinite(dist[ev[i], ev[j]]):
                g.add_edge(i, j, weight=top - int(dist[ev[i], ev[j]] * _INT_SCALE))
            g.add_edge(k + i, k + j, weight=top)
        if np.isfinite(dist[ev[i], b]):
            g.add_edge(i, k + i, weight=top - int(dist[ev[i], b] * _INT_SCALE))
    mate = nx.max_weight_matching(g, maxcardinality=True)
    pairs = []
    for u, v in mate:
        u, v = min(u, v), max(u, v)
        if u < k and v < k:
            pairs.append((ev[u], ev[v]))
        elif u < k:
            pairs.append((ev[u], b))
    return pairs


def brute_force_min_weight(dist: np.ndarray, events: Sequence[int], b: int) -> float:
    """Reference: enumerate every pairing (events may also go to the boundary)."""
    events = list(events)
    if not events:
        return 0.0
    first, rest = events[0], events[1:]
    best = dist[first, b] + brute_force_min_weight(dist, rest, b)
    for idx, other in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1 :]
        best = min(best, dist[first, other] + brute_force_min_weight(dist, remaining, b))
    return best


def build_graph(channels: Sequence[FaultChannel], circuit: Circuit, sector: str) -> DetectorGraph:
    """Detector graph for one CSS sector ('X' or 'Z' measurement basis)."""
    dets = [k for k in range(len(circuit.detectors)) if circuit.detector_basis(k) == sector]
    member = set(dets)
    g = DetectorGraph(dets)
    for ch in channels:
        ev = [d for d in ch.detectors if d in member]
        if not ev:
            continue
        if len(ev) > 2:
            raise HyperedgeError(
                f"fault {ch.pauli} at site {ch.site} fires {len(ev)} {sector} detectors: {ev}"
            )
        mask = 0
        for o in ch.observables:
            mask |= 1 << o
        if ch.probability <= 0:
            continue
        g.add(ev[0], ev[1] if len(ev) == 2 else DetectorGraph.BOUNDARY, ch.probability, mask)
    return g


# -- Monte Carlo ------------------------------------------------------------

@dataclass
class MemoryExperiment:
    """Sampler and decoder for one memory circuit, restricted to the observable's sector."""

    circuit: Circuit
    noise: NoiseModel
    chunk: int = 20_000

    def __post_init__(self):
        c = self.circuit
        obs_basis = {c.measurements[m][1] for m in c.observables[0]}
        (self.sector,) = obs_basis
        self.channels = enumerate_fault_channels(c, self.noise)
        self.graph = build_graph(self.channels, c, self.sector)
        col = {d: i for i, d in enumerate(self.graph.detectors)}
        nd = len(col)
        self._width = nd + 1  # last column = observable 0
        sig = np.zeros((len(self.channels), self._width), dtype=np.uint8)
        for f, ch in enumerate(self.channels):
            for d in ch.detectors:
                if d in col:
                    sig[f, col[d]] = 1
            if 0 in ch.observables:
                sig[f, nd] = 1
        self._sig = np.packbits(sig, axis=1)
        # channels grouped by noise site, in site order
        sites = sorted({ch.site for ch in self.channels})
        first = {}
        for f, ch in enumerate(self.channels):
            first.setdefault(ch.site, f)
        self._site_first = np.array([first[s] for s in sites])
        self._site_arity = np.array([3 if len(self.channels[first[s]].pauli) == 1 else 15 for s in sites])

    def sample(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Packed (shots, bytes) syndrome+observable rows."""
        out = np.zeros((shots, self._sig.shape[1]), dtype=np.uint8)
        p = self.noise.p
        if p <= 0:
            return out
        counts = rng.binomial(shots, p, size=len(self._site_first))
        for s in np.flatnonzero(counts):
            who = rng.choice(shots, size=counts[s], replace=False)
            which = self._site_first[s] + rng.integers(0, self._site_arity[s], size=counts[s])
            np.bitwise_xor.at(out, who, self._sig[which])
        return out

    def failures(self, shots: int, rng: np.random.Generator) -> int:
        rows = np.unpackbits(self.sample(shots, rng), axis=1)[:, : self._width]
        nd = self._width - 1
        uniq, inv = np.unique(rows, axis=0, return_inverse=True)
        wrong = np.zeros(len(uniq), dtype=bool)
        for u, row in enumerate(uniq):
            events = [self.graph.detectors[i] for i in np.flatnonzero(row[:nd])]
            wrong[u] = (self.graph.decode(events).prediction & 1) != row[nd]
        return int(wrong[inv.ravel()].sum())

    def run(self, shots: int, seed: int, threads: int = 1) -> int:
        """Total failures over ``shots``; chunk i always draws from stream (seed, i), so the
        result does not depend on ``threads``."""
        jobs = [(i, min(self.chunk, shots - start)) for i, start in enumerate(range(0, shots, self.chunk))]
        job = lambda ij: self.failures(ij[1], stream(seed, ij[0]))
        if threads <= 1 or len(jobs) == 1:
            return sum(map(job, jobs))
        with ThreadPoolExecutor(threads) as pool:
            return sum(pool.map(job, jobs))


def memory_basis_for_error(basis: str) -> str:
    """Z-type logical errors are seen by an X-basis memory and vice versa."""
    return {"Z": "X", "X": "Z"}[basis]


def logical_error_rate(dims: PatchDims, basis: str, p: float, shots: int, seed: int = 0, threads: int = 1):
    """Posterior mean and 3-sigma interval of the ``basis``-type logical error rate over ``dims.rounds`` rounds."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    circuit = build_memory_circuit(dims, memory_basis_for_error(basis))
    fails = MemoryExperiment(circuit, NoiseModel(p)).run(shots, seed, threads)
    return posterior_estimate(fails, shots)
