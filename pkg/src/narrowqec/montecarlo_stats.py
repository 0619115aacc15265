"""Posterior statistics and the logical-error fit families for rectangular patches."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize, stats

KINDS = ("pZ_rect", "pX_rect", "sc_round")
# two-sided mass outside +-3 sigma of a normal
THREE_SIGMA_TAIL = 2 * stats.norm.sf(3.0)


@dataclass(frozen=True)
class FitParams:
    kind: str
    d_X: int | None = None
    alpha: float | None = None
    beta: float | None = None
    coeffs: tuple[float, float, float] | None = None
    A: float = 0.3
    B: float = 70.0
    residuals: tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown fit kind {self.kind!r}")


def eval_fit(f: FitParams, d_X: int, d_Z: int, p: float) -> float:
    """Evaluate a fit.  For ``sc_round`` the distance is ``d_Z`` (``d_X`` is ignored)."""
    if f.kind == "sc_round":
        return f.A * (f.B * p) ** ((d_Z + 1) // 2)
    if f.d_X is not None and f.d_X != d_X:
        raise ValueError(f"fit was made for d_X={f.d_X}, asked for d_X={d_X}")
    if f.kind == "pZ_rect":
        return f.alpha * (d_X - 0.5) / (d_Z - 0.5) * d_Z * (f.beta * p) ** ((d_Z + 1) // 2)
    a, b, c = f.coeffs
    return (a * d_Z**2 + b * d_Z + c) * p ** ((d_X + 1) // 2)


@lru_cache(maxsize=1)
def _shipped() -> dict:
    text = resources.files("narrowqec.data").joinpath("rect_fit_params.json").read_text()
    return json.loads(text)


def reference_fit(kind: str, d_X: int | None = None) -> FitParams:
    """The shipped default parameters for one fit family (and width)."""
    raw = _shipped()
    if kind == "sc_round":
        return FitParams("sc_round", A=raw["sc_round"]["A"], B=raw["sc_round"]["B"])
    table = raw.get(kind)
    if table is None:
        raise ValueError(f"unknown fit kind {kind!r}")
    entry = table.get(str(d_X))
    if entry is None:
        raise ValueError(f"no shipped {kind} fit for d_X={d_X}; available {sorted(map(int, table))}")
    if kind == "pZ_rect":
        return FitParams(kind, d_X, alpha=entry["alpha"], beta=entry["beta"])
    return FitParams(kind, d_X, coeffs=tuple(entry["coeffs"]))


def fitted_widths(kind: str = "pZ_rect") -> list[int]:
    return sorted(int(k) for k in _shipped()[kind])


def pZ_rect(d_X: int, d_Z: int, p: float) -> float:
    return eval_fit(reference_fit("pZ_rect", d_X), d_X, d_Z, p)


def pX_rect(d_X: int, d_Z: int, p: float) -> float:
    return eval_fit(reference_fit("pX_rect", d_X), d_X, d_Z, p)


def sc_round(d: int, p: float) -> float:
    return eval_fit(reference_fit("sc_round"), d, d, p)


# -- fitting ----------------------------------------------------------------

def fit_curves(samples: Sequence[tuple[int, int, float, float]], kind: str = "pZ_rect") -> FitParams:
    """Least squares in log space over points ``(d_X, d_Z, p, estimate)`` sharing one d_X."""
    pts = [(int(dx), int(dz), float(p), float(e)) for dx, dz, p, e in samples]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    widths = {dx for dx, *_ in pts}
    if len(widths) != 1:
        raise ValueError(f"fit one d_X at a time, got {sorted(widths)}")
    if len({p for _, _, p, _ in pts}) < 2:
        raise ValueError("all points share one p; the p-dependence is underdetermined")
    if any(e <= 0 for *_, e in pts):
        raise ValueError("estimates must be positive for a log-space fit")
    (d_X,) = widths
    y = np.log([e for *_, e in pts])
    if kind == "pZ_rect":
        expo = np.array([(dz + 1) // 2 for _, dz, _, _ in pts], dtype=float)
        geo = np.log([(d_X - 0.5) / (dz - 0.5) * dz for _, dz, _, _ in pts])
        logp = np.log([p for _, _, p, _ in pts])
        design = np.column_stack([np.ones_like(expo), expo])
        target = y - geo - expo * logp
        if np.linalg.matrix_rank(design) < 2:
            raise ValueError("all points share one d_Z exponent; alpha and beta are not separable")
        (la, lb), *_ = np.linalg.lstsq(design, target, rcond=None)
        res = target - design @ np.array([la, lb])
        return FitParams(kind, d_X, alpha=float(np.exp(la)), beta=float(np.exp(lb)), residuals=tuple(res))
    if kind == "pX_rect":
        e = (d_X + 1) // 2
        dz = np.array([dz for _, dz, _, _ in pts], dtype=float)
        scaled = np.exp(y) / np.array([p**e for _, _, p, _ in pts])
        if len(set(dz)) < 3:
            raise ValueError("a quadratic in d_Z needs at least 3 distinct d_Z values")
        start = np.polyfit(dz, scaled, 2, w=1 / scaled)

        def resid(c):
            f = c[0] * dz**2 + c[1] * dz + c[2]
            return np.log(np.maximum(f, 1e-300)) - np.log(scaled)

        sol = optimize.least_squares(resid, start, x_scale=np.abs(start) + 1e-12)
        return FitParams(kind, d_X, coeffs=tuple(float(c) for c in sol.x), residuals=tuple(sol.fun))
    raise ValueError(f"cannot fit kind {kind!r}")


# -- posteriors ---------------------------------------------------------------

def posterior_estimate(failures: int, shots: int):
    """Uniform-prior posterior mean ``(k+1)/(N+2)`` and central 3-sigma-mass credible interval."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    if not 0 <= failures <= shots:
        raise ValueError(f"failures must lie in [0, shots], got {failures}")
    a, b = failures + 1, shots - failures + 1
    mean = a / (a + b)
    lo, hi = stats.beta.ppf([THREE_SIGMA_TAIL / 2, 1 - THREE_SIGMA_TAIL / 2], a, b)
    return mean, (float(min(lo, mean)), float(max(hi, mean)))


def rate_from_trials(runs: int, total_trials: int):
    """Per-trial failure rate when ``runs`` failures took ``total_trials`` trials in all."""
    return posterior_estimate(runs, total_trials)


# -- CSV -----------------------------------------------------------------------

SAMPLE_FIELDS = ("d_X", "d_Z", "p", "estimate")


def read_samples(text: str) -> list[tuple[int, int, float, float]]:
    rows = csv.DictReader(io.StringIO(text))
    return [(int(r["d_X"]), int(r["d_Z"]), float(r["p"]), float(r["estimate"])) for r in rows]


def write_samples(samples: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SAMPLE_FIELDS)
    for s in samples:
        w.writerow(s)
    return buf.getvalue()


def geometric_summary(rounds: Sequence[int]) -> dict:
    """Mean, SD and the implied per-round rate of a rounds-to-failure sample."""
    r = np.asarray(rounds, dtype=float)
    mean = float(r.mean())
    return {"runs": len(r), "mean": mean, "sd": float(r.std(ddof=1)) if len(r) > 1 else math.nan, "rate": 1 / mean}
