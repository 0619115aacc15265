"""Command-line front end.

Every subcommand writes its table (CSV) or structure (JSON) into the output
directory together with a ``<name>.manifest.json`` recording the parameters,
seed, version and SHA-256 of each output file.  Outputs carry no timestamps,
so an identical manifest means identical bytes.

Exit codes: 0 success, 1 infeasible or failed verification, 2 bad arguments.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__

OUT_ENV = "NARROWQEC_OUT"
SCHEMA_VERSION = 1


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", *header])
    for r in rows:
        w.writerow([SCHEMA_VERSION, *[_fmt(v) for v in r]])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v


class Output:
    def __init__(self, args):
        self.dir = Path(args.out or os.environ.get(OUT_ENV) or "results")
        self.name = args.command.replace("-", "_")
        self.params = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "func")}
        self.files: dict[str, str] = {}

    def write(self, suffix: str, text: str) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        path = self.dir / f"{self.name}{suffix}"
        path.write_text(text)
        self.files[path.name] = hashlib.sha256(text.encode()).hexdigest()
        return path

    def table(self, header, rows) -> Path:
        return self.write(".csv", _csv_text(header, rows))

    def blob(self, obj) -> Path:
        return self.write(".json", json.dumps(obj, indent=1, sort_keys=True, default=_jsonable) + "\n")

    def manifest(self):
        m = {"subcommand": self.params.get("command"), "parameters": self.params,
             "seed": self.params.get("seed"), "version": __version__, "outputs": self.files}
        self.write(".manifest.json", json.dumps(m, indent=1, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (tuple, set, range)):
        return list(o)
    return str(o)


def _threads(n: int | None) -> int:
    return n if n and n > 0 else (os.cpu_count() or 1)


# -- subcommands -------------------------------------------------------------------

def cmd_surface_sim(args, out: Output) -> int:
    from .mwpm_decoder import MemoryExperiment, memory_basis_for_error
    from .montecarlo_stats import posterior_estimate, pX_rect, pZ_rect
    from .stabilizer_sim.noise import NoiseModel
    from .surface_code import PatchDims, build_memory_circuit

    rows = []
    for d_Z in args.dz:
        dims = PatchDims(args.dx, d_Z)
        exp = MemoryExperiment(build_memory_circuit(dims, memory_basis_for_error(args.basis)), NoiseModel(args.p))
        fails = exp.run(args.shots, args.seed + d_Z, _threads(args.threads))
        mean, (lo, hi) = posterior_estimate(fails, args.shots)
        fit = (pZ_rect if args.basis == "Z" else pX_rect)(args.dx, d_Z, args.p)
        rows.append([args.dx, d_Z, args.basis, args.p, args.shots, fails, mean, lo, hi, fit])
        print(f"d_X={args.dx} d_Z={d_Z} {args.basis}: {fails}/{args.shots} -> {mean:.3g} [{lo:.3g}, {hi:.3g}]  fit {fit:.3g}")
    out.table(["d_X", "d_Z", "basis", "p", "shots", "failures", "rate", "lo", "hi", "fit"], rows)
    return 0


def cmd_fit(args, out: Output) -> int:
    from .montecarlo_stats import fit_curves, read_samples, reference_fit

    if args.input is None:
        f = reference_fit(args.kind, args.dx)
    else:
        f = fit_curves(read_samples(Path(args.input).read_text()), args.kind)
    out.blob(f.__dict__)
    print(json.dumps(f.__dict__, default=_jsonable))
    return 0


def cmd_bus(args, out: Output) -> int:
    from .bus_model import BusConfig, BusInfeasible, bus_performance, folded_iteration_error, ghz_bus_max_length, max_bus_length

    if args.kind == "ghz":
        n = ghz_bus_max_length(args.p, args.d, args.t)
        out.table(["p", "d", "t", "N_max"], [[args.p, args.d, args.t, n]])
        print(n)
        return 0
    cfg = BusConfig(args.w, args.d, args.N, args.p)
    budget = folded_iteration_error(cfg)
    n_max = max_bus_length(args.w, args.d, args.p)
    result = {"config": cfg.__dict__, "budget": budget.__dict__, "q": budget.total, "N_max": n_max}
    header = ["w", "d", "N", "p", "N_max", "q", "repetitions", "cycles", "patch_error", "bus_error"]
    try:
        perf = bus_performance(cfg)
    except BusInfeasible as e:
        result["infeasible"] = str(e)
        out.blob(result)
        out.table(header, [[cfg.w, cfg.d, cfg.N, cfg.p, n_max, budget.total, None, None, None, None]])
        print(f"infeasible: q={budget.total:.3g} N_max={n_max}")
        return 1
    result["performance"] = perf.__dict__
    out.blob(result)
    out.table(header, [[cfg.w, cfg.d, cfg.N, cfg.p, n_max, perf.q, perf.repetitions, perf.cycles,
                        perf.patch_error, perf.bus_error]])
    print(f"q={perf.q:.3g} N_max={n_max} repetitions={perf.repetitions} cycles={perf.cycles} "
          f"bus_error={perf.bus_error:.3g} patch_error={perf.patch_error:.3g}")
    return 0


def cmd_block_sim(args, out: Output) -> int:
    from .block_codes.simulate import estimate_logical_rate, logical_rate_fit

    rows = []
    for p in args.p:
        r = estimate_logical_rate(args.code, p, args.runs, args.seed, threads=_threads(args.threads))
        fit = logical_rate_fit(args.code, p)
        rows.append([r.code, p, r.runs, r.total_rounds, r.mean_rounds, r.rate, r.ci[0], r.ci[1], fit])
        print(f"{r.code} p={p:g}: rate {r.rate:.3g} [{r.ci[0]:.3g}, {r.ci[1]:.3g}]  fit {fit:.3g}")
    out.table(["code", "p", "runs", "total_rounds", "mean_rounds", "rate", "lo", "hi", "fit"], rows)
    return 0


def cmd_decoder_table(args, out: Output) -> int:
    from .block_codes.decoder_table import check_table, generate_decoder_table
    from .block_codes.extraction import ExtractionRound

    er = ExtractionRound(args.code)
    table = generate_decoder_table(er)
    rep = check_table(er, table)
    out.write(".json", table.to_json(er.code.n) + "\n")
    print(f"{er.code.name}: {len(table.entries)} entries, {rep.faults} faults, "
          f"{len(rep.failures)} logical failures, {len(rep.flag_violations)} flag violations")
    return 0 if rep.ok else 1


def cmd_concat_search(args, out: Output) -> int:
    from .concat_estimator import search_min_width

    rows = search_min_width(args.code, args.p, args.target)
    out.table(["stack", "levels", "d_sc", "d_b", "w", "p_l", "block_size", "qubit_density"],
              [[r.stack, r.levels, r.d_sc, r.d_b, r.w, r.p_l, r.block_size, r.qubit_density] for r in rows])
    for r in rows:
        print(f"{r.levels}L d_sc={r.d_sc} d_b={r.d_b} w={r.w} p_l={r.p_l:.3g} block={r.block_size}")
    return 0 if rows else 1


def _grid(text: str) -> np.ndarray:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2]) if len(parts) > 2 else 40
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {e}") from None
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: need 0 < lo < hi")
    return np.geomspace(lo, hi, n)


def cmd_bias_scan(args, out: Output) -> int:
    from .biased_rep_estimator import ScanConfig, threshold_scan

    thr, pts = threshold_scan(args.dx, args.p_grid, args.target, ScanConfig(mode=args.mode))
    out.table(["p", "d_Z", "d_rc_min", "pX_log", "pZ_log", "p_cnot", "qubits", "width"],
              [[pt.p, pt.d_Z, pt.d_rc, pt.pX_log, pt.pZ_log, pt.p_cnot, pt.qubits, pt.width] for pt in pts])
    print(f"d_X={args.dx}: threshold {thr:.3g} (width {pts[0].width})")
    return 0 if np.isfinite(thr) else 1


def cmd_zx_verify(args, out: Output) -> int:
    from .zx_verifier import sweep_bus_equivalence, verify_bus_equivalence

    if args.all:
        ok, total = sweep_bus_equivalence()
    else:
        ok, total = int(verify_bus_equivalence(*args.bits)), 1
    out.blob({"passed": ok, "total": total})
    print(f"{ok}/{total}")
    return 0 if ok == total else 1


def cmd_repro(args, out: Output) -> int:
    tests = Path(__file__).resolve().parents[2] / "tests" / "test_acceptance.py"
    if not tests.exists():
        print(f"acceptance suite not found at {tests}", file=sys.stderr)
        return 1
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-s", str(tests)], capture_output=True, text=True)
    sys.stdout.write(proc.stdout)
    out.write(".log", proc.stdout)
    return 0 if proc.returncode == 0 else 1


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--shots", type=int, default=100_000)
    common.add_argument("--threads", type=int, default=0, help="0 = all cores")
    common.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./results)")

    ap = argparse.ArgumentParser(prog="narrowqec", description="Fixed-width lattice QEC estimates.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("surface-sim", parents=[common], help="rectangular memory Monte Carlo")
    s.add_argument("--dx", type=int, default=3)
    s.add_argument("--dz", type=int, nargs="+", default=[3])
    s.add_argument("--basis", choices=("Z", "X"), default="Z", help="logical error type")
    s.add_argument("--p", type=float, default=1e-3)
    s.set_defaults(func=cmd_surface_sim)

    s = sub.add_parser("fit", parents=[common], help="fit or print a rectangular-patch model")
    s.add_argument("--kind", choices=("pZ_rect", "pX_rect", "sc_round"), default="pZ_rect")
    s.add_argument("--dx", type=int, default=3)
    s.add_argument("--input", help="CSV of d_X,d_Z,p,estimate")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("bus", parents=[common], help="GHZ or folded bus calculators")
    s.add_argument("kind", choices=("ghz", "folded"))
    s.add_argument("--p", type=float, default=1e-3)
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--t", type=int, default=4)
    s.add_argument("--w", type=int, default=3)
    s.add_argument("--N", type=int, default=2)
    s.set_defaults(func=cmd_bus)

    s = sub.add_parser("block-sim", parents=[common], help="rounds-to-failure block-code Monte Carlo")
    s.add_argument("--code", default="steane713")
    s.add_argument("--p", type=float, nargs="+", default=[1e-4])
    s.add_argument("--runs", type=int, default=100)
    s.set_defaults(func=cmd_block_sim)

    s = sub.add_parser("decoder-table", parents=[common], help="build and check a flagged decoder table")
    s.add_argument("--code", default="steane713")
    s.set_defaults(func=cmd_decoder_table)

    s = sub.add_parser("concat-search", parents=[common], help="minimum-width architecture search")
    s.add_argument("--code", default="steane713", choices=("surface", "surface_bus", "steane713", "css1573"))
    s.add_argument("--p", type=float, default=1e-3)
    s.add_argument("--target", type=float, default=1e-15)
    s.set_defaults(func=cmd_concat_search)

    s = sub.add_parser("bias-scan", parents=[common], help="repetition-over-biased-patch threshold scan")
    s.add_argument("--dx", type=int, default=3)
    s.add_argument("--p-grid", type=_grid, default=_grid("5e-5:4e-3:60"), help="lo:hi[:n] log-spaced")
    s.add_argument("--target", type=float, default=1e-6)
    s.add_argument("--mode", choices=("bussed", "nonbussed"), default="bussed")
    s.set_defaults(func=cmd_bias_scan)

    s = sub.add_parser("zx-verify", parents=[common], help="folded-bus ZX equivalence check")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true")
    g.add_argument("--bits", type=int, nargs=8, choices=(0, 1), metavar="B")
    s.set_defaults(func=cmd_zx_verify)

    s = sub.add_parser("repro", parents=[common], help="run the acceptance suite")
    s.set_defaults(func=cmd_repro)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)  # exits 2 on argument errors
    out = Output(args)
    try:
        code = args.func(args, out)
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        ap.print_usage(sys.stderr)
        return 2
    out.manifest()
    return code


if __name__ == "__main__":
    raise SystemExit(main())
