"""Derive the X-rate constant of the biased repetition estimator and report both conventions.

Reference operating point: d_X=3, d_Z=19, p=1e-4, bussed timing, with a quoted
effective X rate of 0.158 and Z rate of 6.91e-21 per CNOT cycle.

    python3 scripts/calibrate_bias.py
"""
import argparse

from narrowqec.biased_rep_estimator import (RateConvention, RepCodeConfig, calibrate_c_X,
                                            effective_patch_rates, rep_logical_rates)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--px", type=float, default=0.158)
    ap.add_argument("--pz", type=float, default=6.91e-21)
    ap.add_argument("--d-rc", type=int, default=123)
    args = ap.parse_args(argv)
    for xc in ("per_step", "per_round"):
        for zc in ("per_step", "per_round"):
            raw = RateConvention(xc, zc, c_X=1.0)
            px, pz = effective_patch_rates(RepCodeConfig(3, 19, 1, "bussed", 1e-4, raw))
            print(f"x:{xc:9s} z:{zc:9s} raw pX_eff={px:.4g} (ref/raw {args.px / px:.4f})  "
                  f"raw pZ_eff={pz:.4g} (ref/raw {args.pz / pz:.4f})")
    c_X = calibrate_c_X(3, 19, 1e-4, args.px)
    print(f"\ncalibrated c_X (per_step) = {c_X:.4f}")
    for on_x in (True, False):
        conv = RateConvention(c_X=round(c_X, 3), cnot_factor_on_x=on_x)
        pxl, pzl = rep_logical_rates(RepCodeConfig(3, 19, args.d_rc, "bussed", 1e-4, conv))
        print(f"d_rc={args.d_rc} check factor on X={on_x}: pX_log={pxl:.3g} pZ_log={pzl:.3g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
