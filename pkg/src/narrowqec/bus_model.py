"""Analytic costs of the GHZ bus and the folded surface-code bus.

Every term of the folded-bus budget is a rectangular-patch logical error
evaluated from the fit families in :mod:`narrowqec.montecarlo_stats`.  A fit
value covers ``d_Z`` rounds, so a per-round rate is ``fit / d_Z``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction

from scipy import stats

from .montecarlo_stats import eval_fit, fitted_widths, reference_fit, sc_round

# returned by max_bus_length when the search hits its ceiling
BUS_LENGTH_CAP = 10**6
REPETITION_WARN = 1000


class BusInfeasible(ValueError):
    """Per-iteration error at or above the repetition-code capacity of 1/2."""


def _exact(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def ghz_bus_max_length(p: float, d: int, t: int = 4) -> int:
    """Largest N with ``N*t*d^2*p < 1/2`` (strict, in exact rational arithmetic)."""
    if p <= 0:
        raise ValueError("p must be positive")
    if t < 4:
        raise ValueError("each GHZ check round takes at least 4 steps")
    limit = Fraction(1, 2) / (t * d * d * _exact(p))
    return math.ceil(limit) - 1


def separation(N: int, d: int) -> int:
    """Gap length m between two patches N slots apart (patch d plus one spacer column per slot)."""
    return (N - 2) * (d + 1) + 1


@dataclass(frozen=True)
class BusConfig:
    w: int
    d: int
    N: int = 2
    p: float = 1e-3
    m: int | None = None
    t: int = 4

    def __post_init__(self):
        if self.w < 1:
            raise ValueError("bus width must be >= 1")
        if self.N < 2:
            raise ValueError("a bus spans at least two patches")
        if self.d < 1 or self.d % 2 == 0:
            raise ValueError("patch distance must be odd")
        if self.t < 4:
            raise ValueError("t must be >= 4")
        if self.m is None:
            object.__setattr__(self, "m", separation(self.N, self.d))
        if self.m < 1:
            raise ValueError("separation m must be >= 1")

    @property
    def iteration_rounds(self) -> int:
        """Rounds per loop iteration: d of preparation, one split, m merged, one restore."""
        return self.d + self.m + 2


@dataclass(frozen=True)
class ErrorBudget:
    E1: float
    E2: float
    E3: float
    E4_1: float
    E4_2: float
    M_alpha2: float
    M_merge1: float
    M_merge2: float
    charged: tuple[str, ...] = field(default=())

    def terms(self) -> dict[str, float]:
        names = ("E1", "E2", "E3", "E4_1", "E4_2", "M_alpha2", "M_merge1", "M_merge2")
        return {n: getattr(self, n) for n in names}

    @property
    def total(self) -> float:
        """Probability that an odd number of the charged terms fire."""
        even = 1.0
        for n in self.charged:
            even *= 1 - 2 * getattr(self, n)
        return (1 - even) / 2

    @property
    def total_sum(self) -> float:
        return sum(getattr(self, n) for n in self.charged)


ALL_TERMS = ("E1", "E2", "E3", "E4_1", "E4_2", "M_alpha2", "M_merge1", "M_merge2")
DOMINANT_TERMS = ("E2", "E4_1", "E4_2")


def _per_round(kind: str, w: int, length: int, p: float, extrapolate: bool) -> float:
    """One round of a w-wide patch of the given length, from the per-d_Z-rounds fits."""
    L = max(length, w)
    if w in fitted_widths(kind):
        return eval_fit(reference_fit(kind, w), w, L, p) / L
    if not extrapolate:
        raise ValueError(f"no fit for bus width {w}; fitted widths are {fitted_widths(kind)}")
    # square-patch per-round rate scaled by the number of w-wide columns along the length
    return sc_round(w, p) * L / w


def folded_iteration_error(cfg: BusConfig, dominant_only: bool = False, extrapolate: bool = False) -> ErrorBudget:
    """Error terms of one loop iteration of the folded bus.

    The bus patch is w wide and ``2d + m`` long.  E-terms are the short Z
    chains across the width (the pX_rect family, exponent set by w), M-terms
    are readout errors of the complementary type (pZ_rect family).
    """
    w, d, m, p = cfg.w, cfg.d, cfg.m, cfg.p
    full = 2 * d + m
    merged = 2 * d - 1  # patch d plus its d-1 boundary register
    pr = lambda kind, L: _per_round(kind, w, L, p, extrapolate)
    budget = ErrorBudget(
        E1=pr("pX_rect", full),
        E2=min(pr("pX_rect", full) * d, 0.5),
        E3=pr("pX_rect", m),
        E4_1=min(pr("pX_rect", merged) * m, 0.5),
        E4_2=min(pr("pX_rect", merged) * m, 0.5),
        M_alpha2=pr("pZ_rect", m),
        M_merge1=pr("pZ_rect", merged),
        M_merge2=pr("pZ_rect", merged),
        charged=DOMINANT_TERMS if dominant_only else ALL_TERMS,
    )
    return budget


def majority_failure(q: float, r: int) -> float:
    """P(more than half of r independent votes are wrong), each wrong with probability q."""
    return float(stats.binom.sf(r // 2, r, q))


def repetitions_needed(q: float, target: float) -> int:
    """Smallest odd r whose majority-vote failure is at most ``target``."""
    if q >= 0.5:
        raise BusInfeasible(f"per-iteration error {q} is at or above the repetition capacity 0.5")
    if target <= 0:
        raise ValueError("target must be positive")
    ok = lambda r: majority_failure(q, r) <= target * (1 + 1e-12)
    if q <= 0 or ok(1):
        return 1
    hi = 3
    while not ok(hi):
        hi = 2 * hi + 1
    lo = (hi - 1) // 2  # odd and failing (or 1)
    while hi - lo > 2:
        mid = (lo + hi) // 2
        mid += 1 - mid % 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    if hi > REPETITION_WARN:
        warnings.warn(f"{hi} repetitions needed at per-iteration error {q}", RuntimeWarning, stacklevel=2)
    return hi


@dataclass(frozen=True)
class BusPerformance:
    w: int
    d: int
    N: int
    p: float
    q: float
    repetitions: int
    cycles: int
    patch_error: float
    bus_error: float


def bus_performance(cfg: BusConfig, dominant_only: bool = False, extrapolate: bool = False) -> BusPerformance:
    """Repetitions that push the bus error under the patch memory error accrued while it runs."""
    q = folded_iteration_error(cfg, dominant_only, extrapolate).total
    if q >= 0.5:
        raise BusInfeasible(f"per-iteration error {q:.3g} for {cfg}")
    per_round = sc_round(cfg.d, cfg.p)
    r = 1
    while True:
        cycles = r * cfg.iteration_rounds
        target = per_round * cycles
        bus_error = majority_failure(q, r)
        if bus_error <= target * (1 + 1e-12) or q == 0:
            return BusPerformance(cfg.w, cfg.d, cfg.N, cfg.p, q, r, cycles, target, bus_error)
        r += 2
        if r > 100 * REPETITION_WARN:
            raise BusInfeasible("repetition search did not converge")


def max_bus_length(w: int, d: int, p: float, dominant_only: bool = False, extrapolate: bool = False) -> int:
    """Largest N with per-iteration error below 1/2; 0 if even adjacent patches fail, cap if unbounded."""
    feasible = lambda N: folded_iteration_error(BusConfig(w, d, N, p), dominant_only, extrapolate).total < 0.5
    if not feasible(2):
        return 0
    lo, hi = 2, 4
    while feasible(hi):
        lo, hi = hi, hi * 2
        if hi > BUS_LENGTH_CAP:
            return BUS_LENGTH_CAP if feasible(BUS_LENGTH_CAP) else _bisect(feasible, lo, BUS_LENGTH_CAP)
    return _bisect(feasible, lo, hi)


def _bisect(feasible, lo: int, hi: int) -> int:
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo
