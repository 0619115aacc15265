"""Rounds-to-failure Monte Carlo and the polynomial logical-rate fits."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize

from ..montecarlo_stats import posterior_estimate
from ..stabilizer_sim.noise import NoiseModel
from ..stabilizer_sim.rng import stream
from .codes import BlockCode, get_code
from .decoder_table import DecoderTable, decode, generate_decoder_table
from .extraction import BlockSimConfig, ExtractionRound, pauli_masks

# quartic fits in p: coefficients of p^2, p^3, p^4
RATE_FITS = {
    "steane713": (2.23e4, -3.5e6, 1.7e8),
    "css1573": (8.00e5, -6.0e8, 14e10),
}
# the initial logical states cycle through Z, X and Y types (both signs behave alike for frames)
STATE_TYPES = ("Z", "Z", "X", "X", "Y", "Y")
NEVER_FAILED = -1


def logical_rate_fit(code: str, p: float) -> float:
    """Per-round logical error rate from the quartic fit of one code."""
    a2, a3, a4 = RATE_FITS[get_code(code).name]
    return a2 * p**2 + a3 * p**3 + a4 * p**4


def pseudo_threshold(code: str, bracket=(1e-8, 1e-3)) -> float:
    """The p where the fitted logical rate equals p."""
    return optimize.brentq(lambda p: logical_rate_fit(code, p) - p, *bracket, xtol=1e-15)


@lru_cache(maxsize=None)
def _cached(code_name: str, config: BlockSimConfig) -> tuple[ExtractionRound, DecoderTable]:
    er = ExtractionRound(code_name, config)
    return er, generate_decoder_table(er)


def logical_failure(code: BlockCode, x: int, z: int, state: str) -> bool:
    """Ideal decode of a copy, then whether the residual flips the initial state's logical value."""
    rx = x ^ code.leaders.get(code.syndrome(x), 0)
    rz = z ^ code.leaders.get(code.syndrome(z), 0)
    # Z-type states see X errors, X-type see Z errors, Y-type see their product
    probe = {"Z": rx, "X": rz, "Y": rx ^ rz}[state]
    return not code.is_stabilizer(probe)


@dataclass
class BlockSimulator:
    code: str
    p: float
    config: BlockSimConfig = field(default_factory=BlockSimConfig)
    max_rounds: int = 10**9

    def __post_init__(self):
        self.er, self.table = _cached(get_code(self.code).name, self.config)
        cs = self.er.noisy
        self._arity = [len(s.qubits) for s in cs.sites]
        self._qubits = [s.qubits for s in cs.sites]
        self.sites_per_set = len(cs.sites)
        self.clean_sets = self.er.code.sets[0]

    def _draw_gap(self, rng) -> int:
        # fault-free sites before the next fault
        return int(rng.geometric(self.p)) - 1 if self.p > 0 else 1 << 62

    def run(self, seed: int, run_index: int = 0) -> int:
        """Rounds until the first logical failure (``NEVER_FAILED`` if the cap is reached)."""
        rng = stream(seed, run_index)
        state = STATE_TYPES[run_index % len(STATE_TYPES)]
        code, er, cs = self.er.code, self.er, self.er.noisy
        S = self.sites_per_set
        clean = self.clean_sets * S
        gap = self._draw_gap(rng)
        x = z = 0
        rounds = 0
        while rounds < self.max_rounds:
            if x == 0 and z == 0:
                skip = gap // clean
                if rounds + skip >= self.max_rounds:
                    return NEVER_FAILED
                rounds += skip
                gap -= skip * clean

            def source(_set_index):
                nonlocal gap
                faults = {}
                pos = gap
                while pos < S:
                    P = int(rng.integers(1, 4 if self._arity[pos] == 1 else 16))
                    mx, mz = pauli_masks(P, self._qubits[pos])
                    old = faults.get(pos, (0, 0))
                    faults[pos] = (old[0] ^ mx, old[1] ^ mz)
                    pos += 1 + self._draw_gap(rng)
                gap = pos - S
                return faults

            x, z, history = er.run_round(cs, x, z, source)
            cx, cz = decode(er, self.table, history)
            x ^= cx
            z ^= cz
            rounds += 1
            if logical_failure(code, x, z, state):
                return rounds
            if code.is_stabilizer(x) and code.is_stabilizer(z):
                x = z = 0
        return NEVER_FAILED


def simulate_to_failure(code: str, p: float, seed: int, run_index: int = 0, config: BlockSimConfig | None = None, max_rounds: int = 10**9) -> int:
    return BlockSimulator(code, p, config or BlockSimConfig(), max_rounds).run(seed, run_index)


@dataclass(frozen=True)
class BlockRate:
    code: str
    p: float
    runs: int
    total_rounds: int
    mean_rounds: float
    sd_rounds: float
    rate: float
    ci: tuple[float, float]


def estimate_logical_rate(code: str, p: float, runs: int, seed: int, config: BlockSimConfig | None = None,
                          max_rounds: int = 10**9, threads: int = 1) -> BlockRate:
    """Rate = runs / total rounds, i.e. 1/mean rounds-to-failure, with a Beta posterior interval."""
    sim = BlockSimulator(code, p, config or BlockSimConfig(), max_rounds)
    one = lambda i: sim.run(seed, i)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rounds = np.array(list(pool.map(one, range(runs))), dtype=np.int64)
    else:
        rounds = np.array([one(i) for i in range(runs)], dtype=np.int64)
    failed = rounds[rounds != NEVER_FAILED]
    total = int(failed.sum() + (rounds == NEVER_FAILED).sum() * max_rounds)
    mean, ci = posterior_estimate(len(failed), max(total, len(failed)))
    return BlockRate(
        get_code(code).name, p, runs, total,
        float(failed.mean()) if len(failed) else float("inf"),
        float(failed.std(ddof=1)) if len(failed) > 1 else float("nan"),
        mean, ci,
    )
