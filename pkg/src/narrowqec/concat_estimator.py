"""Architecture search over surface code, bus width and block-code concatenation depth.

The level-0 operation is a bus-mediated CNOT between two surface-code patches,
charged the worst-case bus length. Each concatenation level feeds the rate of
the level below, multiplied by a time-scale factor, into the quartic fit of the
block code. The factors stand for the extra time that inter-block operations
take and are not derivable from first principles here, so they live in a data
file produced by ``scripts/calibrate_concat.py``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources

from .block_codes.simulate import logical_rate_fit
from .bus_model import BusConfig, BusInfeasible, bus_performance
from .montecarlo_stats import sc_round

STACKS = ("surface", "surface_bus", "steane713", "css1573")
# physical-qubit slots per level-1 block, and the growth per extra level
BLOCK_SLOTS = {"steane713": (11, 9), "css1573": (20, 18)}
LOGICALS_PER_BLOCK = {"steane713": 1, "css1573": 7}
FIT_LIMIT = 1e-3
INFEASIBLE = math.inf


def sc_lattice_surgery_rate(d: int, p: float) -> float:
    """Per-round surface-code rate times the d+1 rounds of a lattice-surgery step."""
    if d % 2 == 0:
        raise ValueError("distance must be odd")
    return (d + 1) * sc_round(d, p)


def width(d_sc: int, d_b: int | None = None) -> int:
    """Array width in qubits: two patch columns plus two bus strips, or four patch columns without a bus."""
    if d_b is None:
        return 4 * d_sc - 1
    return 2 * d_sc + 2 * d_b - 1


def block_size(stack: str, levels: int, d_sc: int, d_b: int | None) -> int:
    w = width(d_sc, d_b)
    if stack == "surface":
        return w * (w + 1) // 2
    if stack == "surface_bus":
        return w * (w + 1)
    first, growth = BLOCK_SLOTS[stack]
    return w * (w + 1) * first * growth ** (levels - 1)


def qubit_density(stack: str, levels: int, d_sc: int, d_b: int | None) -> float:
    per = LOGICALS_PER_BLOCK[stack] ** levels if stack in LOGICALS_PER_BLOCK else 1
    return block_size(stack, levels, d_sc, d_b) / per


@dataclass(frozen=True)
class TimeScaling:
    """Multiplicative factor on the input rate of each level; the last entry covers all deeper levels."""
    steane713: tuple = (1.0, 1.0, 1.0)
    css1573: tuple = (1.0, 1.0, 1.0)
    bus_length: int = 2

    def factor(self, code: str, level: int) -> float:
        seq = getattr(self, code)
        return seq[min(level, len(seq)) - 1]

    @classmethod
    def load(cls, text: str | None = None) -> TimeScaling:
        if text is None:
            text = resources.files("narrowqec.data").joinpath("concat_time_scales.json").read_text()
        raw = json.loads(text)
        return cls(tuple(raw["steane713"]), tuple(raw["css1573"]), int(raw.get("bus_length", 2)))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)


@lru_cache(maxsize=1)
def default_scaling() -> TimeScaling:
    return TimeScaling.load()


@lru_cache(maxsize=None)
def bus_cnot_rate(d_sc: int, d_b: int, p: float, bus_length: int = 2) -> float:
    """Patch memory error while the bus runs plus the majority-vote bus failure; inf if infeasible."""
    try:
        perf = bus_performance(BusConfig(d_b, d_sc, bus_length, p))
    except BusInfeasible:
        return INFEASIBLE
    return perf.patch_error + perf.bus_error


def concatenated_rate(code: str, levels: int, d_sc: int, d_b: int, p: float,
                      scaling: TimeScaling | None = None) -> float:
    """Logical CNOT rate of a `levels`-deep stack; INFEASIBLE once a fit input exceeds its range."""
    scaling = scaling or default_scaling()
    rate = bus_cnot_rate(d_sc, d_b, p, scaling.bus_length)
    for level in range(1, levels + 1):
        x = scaling.factor(code, level) * rate
        if not x <= FIT_LIMIT:
            return INFEASIBLE
        rate = logical_rate_fit(code, x)
    return rate


@dataclass(frozen=True)
class ArchitectureRow:
    stack: str
    levels: int
    d_sc: int
    d_b: int | None
    p: float
    p_l: float
    target: float = 1e-15

    @property
    def w(self) -> int:
        return width(self.d_sc, self.d_b)

    @property
    def block_size(self) -> int:
        return block_size(self.stack, self.levels, self.d_sc, self.d_b)

    @property
    def qubit_density(self) -> float:
        return qubit_density(self.stack, self.levels, self.d_sc, self.d_b)

    @property
    def feasible(self) -> bool:
        return self.p_l <= self.target

    def as_dict(self) -> dict:
        out = asdict(self)
        out.update(w=self.w, block_size=self.block_size, qubit_density=self.qubit_density,
                   feasible=self.feasible)
        return out


def evaluate(stack: str, levels: int, d_sc: int, d_b: int | None, p: float,
             scaling: TimeScaling | None = None, target: float = 1e-15) -> ArchitectureRow:
    if stack == "surface":
        rate = sc_lattice_surgery_rate(d_sc, p)
    elif stack == "surface_bus":
        rate = bus_cnot_rate(d_sc, d_b, p, (scaling or default_scaling()).bus_length)
    else:
        rate = concatenated_rate(stack, levels, d_sc, d_b, p, scaling)
    return ArchitectureRow(stack, levels, d_sc, d_b, p, rate, target)


@dataclass
class SearchSpace:
    d_sc: range = field(default_factory=lambda: range(3, 61, 2))
    d_b: range = field(default_factory=lambda: range(3, 9, 2))  # widths with a rectangular-patch fit
    max_levels: int = 12


def search_min_width(stack: str, p: float, target: float = 1e-15,
                     space: SearchSpace | None = None, scaling: TimeScaling | None = None) -> list[ArchitectureRow]:
    """Narrowest feasible configuration per level count (ties broken by block size)."""
    space = space or SearchSpace()
    if stack == "surface":
        grid = [(0, d, None) for d in space.d_sc]
    elif stack == "surface_bus":
        grid = [(0, d, b) for d in space.d_sc for b in space.d_b]
    else:
        grid = [(L, d, b) for L in range(1, space.max_levels + 1) for d in space.d_sc for b in space.d_b]
    best: dict[int, ArchitectureRow] = {}
    for L, d, b in grid:
        row = evaluate(stack, L, d, b, p, scaling, target)
        if not row.feasible:
            continue
        cur = best.get(L)
        if cur is None or (row.w, row.block_size) < (cur.w, cur.block_size):
            best[L] = row
    return [best[L] for L in sorted(best)]


# -- published rows ---------------------------------------------------------------

@dataclass(frozen=True)
class PublishedRow:
    p: float
    stack: str
    levels: int
    d_sc: int
    d_b: int | None
    w: int
    p_l: float
    block_size: float
    density: float
    note: str | None = None


@lru_cache(maxsize=1)
def published_rows() -> tuple[PublishedRow, ...]:
    raw = json.loads(resources.files("narrowqec.data").joinpath("architecture_rows.json").read_text())
    return tuple(PublishedRow(**r) for r in raw["rows"])


def recompute(row: PublishedRow, scaling: TimeScaling | None = None) -> ArchitectureRow:
    return evaluate(row.stack, row.levels, row.d_sc, row.d_b, row.p, scaling)
