"""Acceptance criteria 1-10. Each test records a verdict; the run ends with one line per criterion.

Reference numbers are frozen constants quoted from the published tables, or
values recomputed here independently of the package code.
"""
import math
import time
from collections import Counter

import networkx as nx
import numpy as np
import pytest
from scipy import stats

from oracle import outcome_distribution, random_circuit

from narrowqec.biased_rep_estimator import (RepCodeConfig, effective_patch_rates, rep_logical_rates,
                                            scheme_width, threshold_scan)
from narrowqec.block_codes import (ExtractionRound, check_table, estimate_logical_rate,
                                   generate_decoder_table, logical_rate_fit)
from narrowqec.bus_model import ghz_bus_max_length
from narrowqec.concat_estimator import block_size, published_rows, qubit_density, recompute, width
from narrowqec.montecarlo_stats import pX_rect, pZ_rect
from narrowqec.mwpm_decoder import DetectorGraph, logical_error_rate
from narrowqec.stabilizer_sim import run_tableau, stream
from narrowqec.surface_code import PatchDims
from narrowqec.zx_verifier import sweep_bus_equivalence

pytestmark = pytest.mark.acceptance


def test_c01_ghz_bus_limits(record):
    t0 = time.perf_counter()
    got = [ghz_bus_max_length(1e-3, d, 4) for d in (3, 5, 7)]
    dt = time.perf_counter() - t0
    ok = got == [13, 4, 2] and dt < 1
    record(1, ok, f"N_max(d=3,5,7) = {got}, {dt:.3f}s")
    assert ok


def test_c02_array_widths(record):
    t0 = time.perf_counter()
    rows = published_rows()
    exact, misprint, bad = 0, [], []
    for r in rows:
        w = width(r.d_sc, r.d_b)
        if w == r.w:
            exact += 1
            continue
        # a printed width that disagrees with the formula counts only if the printed
        # block size independently confirms the formula width
        if math.isclose(block_size(r.stack, r.levels, r.d_sc, r.d_b), r.block_size, rel_tol=5e-3):
            misprint.append((r.stack, r.levels, r.d_sc, r.d_b, r.w, w))
        else:
            bad.append(r)
    rep = [scheme_width(d) for d in (3, 5, 7)]
    dt = time.perf_counter() - t0
    ok = not bad and exact == 30 and len(misprint) == len(rows) - 30 and rep == [11, 19, 27] and dt < 1
    record(2, ok, f"{exact}/{len(rows)} rows exact, {len(misprint)} printed-w misprints confirmed by block size, "
                  f"repetition widths {rep}")
    assert ok


def test_c03_zx_bus_equivalence(record):
    t0 = time.perf_counter()
    passed, total = sweep_bus_equivalence()
    dt = time.perf_counter() - t0
    ok = passed == total == 256 and dt < 10
    record(3, ok, f"{passed}/{total} assignments, {dt:.1f}s")
    assert ok


def test_c04_decoder_soundness(record):
    t0 = time.perf_counter()
    parts, ok = [], True
    for code in ("steane713", "css1573"):
        er = ExtractionRound(code)
        rep = check_table(er, generate_decoder_table(er))
        ok &= rep.ok and rep.faults > 0
        parts.append(f"{code}: {rep.faults} faults, {len(rep.failures)} logical, "
                     f"{len(rep.flag_violations)} unflagged")
    dt = time.perf_counter() - t0
    ok &= dt < 300
    record(4, ok, "; ".join(parts) + f", {dt:.0f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="with the fixed seed, pZ(3,7) lands at 2.08x the fit from 41 failures; "
                                       "other seeds give 1.4-1.7x, see README")
def test_c05_rectangular_simulation_vs_fits(record):
    t0 = time.perf_counter()
    p, shots = 1e-3, {"Z": 1_000_000, "X": 200_000}
    ratios, zs = {}, []
    for d_Z in (3, 5, 7):
        for kind, fit in (("Z", pZ_rect), ("X", pX_rect)):
            mean, _ = logical_error_rate(PatchDims(3, d_Z), kind, p, shots[kind], seed=100 + d_Z)
            ratios[(kind, d_Z)] = mean / fit(3, d_Z, p)
            if kind == "Z":
                zs.append(mean)
    dt = time.perf_counter() - t0
    within = all(0.5 <= r <= 2 for r in ratios.values())
    mono = zs[0] > zs[1] > zs[2]
    ok = within and mono and dt < 1800
    txt = ", ".join(f"p{k}(3,{d})/fit={r:.2f}" for (k, d), r in ratios.items())
    record(5, ok, f"{txt}; pZ decreasing={mono}, {dt:.0f}s")
    assert ok


def _random_graph(rng):
    n = int(rng.integers(4, 15))
    g = DetectorGraph(list(range(n)))
    for i in range(1, n):  # spanning chain keeps it connected
        g.add(int(rng.integers(i)), i, float(rng.uniform(1e-3, 0.3)), int(rng.integers(2)))
    for _ in range(int(rng.integers(0, 2 * n))):
        u, v = rng.choice(n, 2, replace=False)
        g.add(int(u), int(v), float(rng.uniform(1e-3, 0.3)), int(rng.integers(2)))
    for u in rng.choice(n, int(rng.integers(1, n + 1)), replace=False):
        g.add(int(u), DetectorGraph.BOUNDARY, float(rng.uniform(1e-3, 0.3)), int(rng.integers(2)))
    return g


def _oracle_min_pairing(g: DetectorGraph, events) -> float:
    h = nx.Graph()
    for (u, v), (pr, _) in g.edges.items():
        w = -math.log(pr)
        if h.has_edge(u, v):
            w = min(w, h[u][v]["weight"])
        h.add_edge(u, v, weight=w)
    sp = dict(nx.all_pairs_dijkstra_path_length(h))
    b = DetectorGraph.BOUNDARY

    def go(rest):
        if not rest:
            return 0.0
        first, tail = rest[0], rest[1:]
        best = sp[first].get(b, math.inf) + go(tail)
        for i, other in enumerate(tail):
            best = min(best, sp[first].get(other, math.inf) + go(tail[:i] + tail[i + 1:]))
        return best
    return go(tuple(events))


def test_c06_mwpm_optimality(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    mismatches = 0
    for _ in range(500):
        g = _random_graph(rng)
        k = int(rng.integers(0, min(12, len(g.detectors)) + 1))
        events = sorted(int(e) for e in rng.choice(g.detectors, k, replace=False))
        m = g.decode(events)
        used = Counter(x for pair in m.pairs for x in pair if x != DetectorGraph.BOUNDARY)
        ref = _oracle_min_pairing(g, events)
        if sorted(used) != events or max(used.values(), default=1) != 1 or not math.isclose(m.weight, ref, rel_tol=1e-9, abs_tol=1e-9):
            mismatches += 1
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 60
    record(6, ok, f"{500 - mismatches}/500 instances optimal, {dt:.1f}s")
    assert ok


def test_c07_steane_rates_and_pseudo_threshold(record):
    t0 = time.perf_counter()
    ps = (3e-5, 1e-4)
    rates = [estimate_logical_rate("steane713", p, 900, seed=713).rate for p in ps]
    ratios = [r / logical_rate_fit("steane713", p) for r, p in zip(rates, ps)]
    # power law through the two simulated points, crossing where rate == p
    k, loga = np.polyfit(np.log(ps), np.log(rates), 1)
    crossing = math.exp(-loga / (k - 1))
    dt = time.perf_counter() - t0
    ok = all(0.5 <= r <= 2 for r in ratios) and 2e-5 <= crossing <= 9e-5 and dt < 3600
    record(7, ok, f"sim/fit at 3e-5: {ratios[0]:.2f}, at 1e-4: {ratios[1]:.2f}; "
                  f"crossing {crossing:.3g} (slope {k:.2f}), {dt:.0f}s")
    assert ok


def test_c08_biased_repetition(record):
    t0 = time.perf_counter()
    cfg = RepCodeConfig(3, 19, 123, "bussed", 1e-4)
    px_eff, pz_eff = effective_patch_rates(cfg)
    px_log, pz_log = rep_logical_rates(cfg)
    z_ok = (math.isclose(pz_eff, 6.91e-21, rel_tol=2e-3)
            and math.isclose(pz_log, pz_eff * 123 * 247, rel_tol=1e-12)
            and f"{pz_log:.2e}" == f"{6.91e-21 * 123 * 247:.2e}" == "2.10e-16")
    x_ok = 1.39e-16 / 3 <= px_log <= 1.39e-16 * 3
    grid = np.geomspace(5e-5, 4e-3, 60)
    th = {d: threshold_scan(d, grid)[0] for d in (3, 5, 7)}
    ref = {3: 2e-4, 5: 8e-4, 7: 1.5e-3}
    th_ok = all(0.5 * ref[d] <= th[d] <= 1.5 * ref[d] for d in ref)
    dt = time.perf_counter() - t0
    ok = z_ok and x_ok and th_ok and dt < 60
    record(8, ok, f"pZ_eff={pz_eff:.4g} pZ_log={pz_log:.3g}, pX_log={px_log:.3g}; thresholds "
                  + ", ".join(f"d_X={d}: {th[d]:.3g}" for d in th) + f", {dt:.0f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="no single set of per-level time factors meets both the x30 band "
                                       "and the 1e-15 ceiling on every row; see README")
def test_c09_concatenation_rows(record):
    t0 = time.perf_counter()
    rows = published_rows()
    above, outside, worst = [], [], 0.0
    for r in rows:
        got = recompute(r).p_l
        ratio = got / r.p_l
        worst = max(worst, abs(math.log10(ratio)) if got > 0 else math.inf)
        if not got <= 1e-15:
            above.append(f"{r.stack} L{r.levels} ({r.d_sc},{r.d_b}) p={r.p:g}: {got:.2g}")
        if not 1 / 30 <= ratio <= 30:
            outside.append(f"{r.stack} L{r.levels} ({r.d_sc},{r.d_b}) p={r.p:g}: x{ratio:.3g}")
    dens = [(qubit_density(r.stack, r.levels, r.d_sc, r.d_b), r.density) for r in rows if r.stack == "css1573"]
    dens_ok = all(f"{a:.3g}" == f"{b:.3g}" for a, b in dens)
    dt = time.perf_counter() - t0
    ok = not above and not outside and dens_ok and dt < 300
    record(9, ok, f"{len(rows)} rows: {len(above)} above 1e-15, {len(outside)} outside x30 "
                  f"(worst {worst:.2f} decades); css1573 density {sum(f'{a:.3g}' == f'{b:.3g}' for a, b in dens)}"
                  f"/{len(dens)} exact"
                  + ("" if ok else f"; above: {above}; outside: {outside}"))
    assert ok


def _chi2_pvalue(dist, samples) -> float:
    keys = sorted(dist)
    counts = Counter(samples)
    if set(counts) - set(keys):
        return 0.0  # tableau produced an outcome the oracle calls impossible
    n = len(samples)
    exp = np.array([dist[k] * n for k in keys])
    obs = np.array([counts.get(k, 0) for k in keys], dtype=float)
    if len(keys) == 1:
        return 1.0
    # pool sparse bins so every expected count is at least 5
    order = np.argsort(exp)
    e_bins, o_bins, e_acc, o_acc = [], [], 0.0, 0.0
    for i in order:
        e_acc += exp[i]
        o_acc += obs[i]
        if e_acc >= 5:
            e_bins.append(e_acc)
            o_bins.append(o_acc)
            e_acc = o_acc = 0.0
    if e_acc and e_bins:
        e_bins[-1] += e_acc
        o_bins[-1] += o_acc
    if len(e_bins) < 2:
        return 1.0
    return float(stats.chisquare(o_bins, e_bins).pvalue)


def test_c10_tableau_vs_dense_oracle(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(10)
    shots, pvals = 10_000, []
    for i in range(50):
        n = int(rng.integers(1, 7))
        c = random_circuit(rng, n, ops=int(rng.integers(4, 13)))
        dist = outcome_distribution(c)
        assert math.isclose(sum(dist.values()), 1.0, abs_tol=1e-9)
        g = stream(10, i)
        samples = [tuple(int(b) for b in run_tableau(c, None, g)) for _ in range(shots)]
        pvals.append(_chi2_pvalue(dist, samples))
    dt = time.perf_counter() - t0
    ok = min(pvals) > 1e-3 and dt < 300
    record(10, ok, f"50 circuits x {shots} shots, min chi-squared p = {min(pvals):.3g}, {dt:.0f}s")
    assert ok
