"""Repetition code over rectangular, strongly biased surface-code patches.

A narrow patch (small d_X, long d_Z) has a suppressed Z rate and a large X
rate. A repetition code of d_rc patches corrects X by majority vote, and the
surviving Z rate grows with the number of patches and parity checks touched.

Rate conventions: a rectangular fit value covers d_Z rounds.  Two ways of
turning it into a per-cycle rate are implemented:

* ``per_step``  fit / d_Z * steps-per-cycle
* ``per_round`` fit * steps-per-cycle / steps-per-syndrome-round

and each error type carries one multiplicative constant on top
(``scripts/calibrate_bias.py`` derives the defaults).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .montecarlo_stats import fitted_widths, pX_rect, pZ_rect

MODES = ("bussed", "nonbussed")
CONVENTIONS = ("per_step", "per_round")


class AboveCapacity(ValueError):
    """Effective X rate at or above the repetition-code capacity of 1/2."""


@dataclass(frozen=True)
class Timing:
    syndrome_round: int
    rep_round: int
    cnot: int


def timing(d_Z: int, mode: str = "bussed") -> Timing:
    """Time steps for one syndrome round, one repetition round, and one logical CNOT."""
    if mode == "bussed":
        k = d_Z * d_Z + d_Z + 1
        return Timing(k, 2 * k, 5 * k)
    if mode == "nonbussed":
        return Timing(9 * d_Z + 4, 18 * d_Z + 8, 18 * d_Z)
    raise ValueError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class RateConvention:
    x_convention: str = "per_step"
    z_convention: str = "per_round"
    c_X: float = 0.941  # calibrated, see scripts/calibrate_bias.py
    c_Z: float = 1.0
    cnot_factor_on_x: bool = True  # apply the (2 d_rc + 1) check count to the X path too

    def __post_init__(self):
        for c in (self.x_convention, self.z_convention):
            if c not in CONVENTIONS:
                raise ValueError(f"convention must be one of {CONVENTIONS}")


@dataclass(frozen=True)
class RepCodeConfig:
    d_X: int
    d_Z: int
    d_rc: int = 1
    mode: str = "bussed"
    p: float = 1e-4
    convention: RateConvention = RateConvention()
    extrapolate: bool = False

    def __post_init__(self):
        if self.d_rc < 1 or self.d_rc % 2 == 0:
            raise ValueError("repetition distance must be odd and positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.d_X not in fitted_widths("pZ_rect") and not self.extrapolate:
            raise ValueError(f"no fit for d_X={self.d_X}")

    @property
    def timing(self) -> Timing:
        return timing(self.d_Z, self.mode)


def _convert(fit_value: float, conv: str, cfg: RepCodeConfig) -> float:
    t = cfg.timing
    if conv == "per_step":
        return fit_value / cfg.d_Z * t.cnot
    return fit_value * t.cnot / t.syndrome_round


def effective_patch_rates(cfg: RepCodeConfig) -> tuple[float, float]:
    """(pX_eff, pZ_eff) of one patch over one logical CNOT cycle."""
    if cfg.p == 0:
        return 0.0, 0.0
    c = cfg.convention
    px = c.c_X * _convert(pX_rect(cfg.d_X, cfg.d_Z, cfg.p), c.x_convention, cfg)
    pz = c.c_Z * _convert(pZ_rect(cfg.d_X, cfg.d_Z, cfg.p), c.z_convention, cfg)
    return px, pz


def majority_tail(n: int, q: float) -> float:
    """P(at least ceil(n/2) of n independent flips)."""
    return float(stats.binom.sf((n + 1) // 2 - 1, n, q))


def rep_logical_rates(cfg: RepCodeConfig) -> tuple[float, float]:
    """(pX_log, pZ_log) of one logical CNOT on the repetition code."""
    px, pz = effective_patch_rates(cfg)
    if px >= 0.5:
        raise AboveCapacity(f"pX_eff={px:.3g} for {cfg}")
    checks = 2 * cfg.d_rc + 1
    px_log = majority_tail(cfg.d_rc, px) * (checks if cfg.convention.cnot_factor_on_x else 1)
    pz_log = pz * cfg.d_rc * checks
    return px_log, pz_log


def calibrate_c_X(d_X: int, d_Z: int, p: float, target_px: float, mode: str = "bussed",
                  convention: RateConvention = RateConvention()) -> float:
    """The X constant that makes pX_eff hit a reference value."""
    raw = replace(convention, c_X=1.0)
    px, _ = effective_patch_rates(RepCodeConfig(d_X, d_Z, 1, mode, p, raw))
    return target_px / px


def patch_qubits(d_X: int, d_Z: int) -> int:
    """Data plus measure qubits of one rotated rectangular patch."""
    return 2 * d_X * d_Z - 1


def qubit_count(d_X: int, d_Z: int, d_rc: int = 1, bus_width: int = 2) -> dict:
    """Footprint of each patch cell including its share of the bus strip, and the total."""
    cell = (2 * d_X + 1 + bus_width) * (2 * d_Z + 1 + bus_width)
    return {"patch": patch_qubits(d_X, d_Z), "cell": cell, "total": cell * d_rc}


def scheme_width(d_X: int) -> int:
    return 4 * d_X - 1


@dataclass(frozen=True)
class ScanPoint:
    p: float
    d_Z: int | None
    d_rc: int | None
    pX_log: float
    pZ_log: float
    qubits: int | None
    width: int

    @property
    def feasible(self) -> bool:
        return self.d_rc is not None

    @property
    def p_cnot(self) -> float:
        return self.pX_log + self.pZ_log


@dataclass(frozen=True)
class ScanConfig:
    d_Z_max: int = 201
    d_rc_max: int = 4001
    mode: str = "bussed"
    convention: RateConvention = RateConvention()
    bus_width: int = 2


def min_repetition(d_X: int, d_Z: int, p: float, target: float, scan: ScanConfig = ScanConfig()):
    """Smallest odd d_rc meeting the target on both error types, or None."""
    base = RepCodeConfig(d_X, d_Z, 1, scan.mode, p, scan.convention)
    px, pz = effective_patch_rates(base)
    if px >= 0.5:
        return None
    for n in range(1, scan.d_rc_max + 1, 2):
        pz_log = pz * n * (2 * n + 1)
        if pz_log > target:
            return None  # only grows from here
        px_log = majority_tail(n, px) * ((2 * n + 1) if scan.convention.cnot_factor_on_x else 1)
        if px_log <= target:
            return n, px_log, pz_log
    return None


def best_point(d_X: int, p: float, target: float, scan: ScanConfig = ScanConfig()) -> ScanPoint:
    """Fewest qubits over d_Z for one physical rate."""
    best = None
    for d_Z in range(d_X, scan.d_Z_max + 1, 2):
        px, _ = effective_patch_rates(RepCodeConfig(d_X, d_Z, 1, scan.mode, p, scan.convention))
        if px >= 0.5:
            break  # pX_eff grows with d_Z
        hit = min_repetition(d_X, d_Z, p, target, scan)
        if hit is None:
            continue
        n, pxl, pzl = hit
        q = qubit_count(d_X, d_Z, n, scan.bus_width)["total"]
        if best is None or q < best.qubits:
            best = ScanPoint(p, d_Z, n, pxl, pzl, q, scheme_width(d_X))
    return best or ScanPoint(p, None, None, math.nan, math.nan, None, scheme_width(d_X))


def threshold_scan(d_X: int, p_grid, code_threshold: float = 1e-6,
                   scan: ScanConfig = ScanConfig()) -> tuple[float, list[ScanPoint]]:
    """(largest feasible p on the grid, the per-p curve)."""
    points = [best_point(d_X, float(p), code_threshold, scan) for p in np.asarray(p_grid, dtype=float)]
    feasible = [pt.p for pt in points if pt.feasible]
    return (max(feasible) if feasible else math.nan), points
