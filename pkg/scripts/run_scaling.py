"""Median Nyström error against m for power-law spectra lambda_i = N i^-p with random orthogonal eigenvectors."""

import argparse
import json

from nystromlab.experiments import scaling_experiment, trial_seeds
from nystromlab.synth import SpectrumSpec, power_law_spectrum, synth_kernel


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=2000)
    ap.add_argument("--p", type=float, nargs="+", default=[2.0, 3.0])
    ap.add_argument("--m-grid", type=int, nargs="+", default=[20, 40, 80, 160, 320])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--master-seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    out = {}
    for p in args.p:
        K, _ = synth_kernel(SpectrumSpec(power_law_spectrum(args.N, p, scale_N=True), seed=args.master_seed))
        res = scaling_experiment(K, args.m_grid, trial_seeds(args.master_seed, args.seeds), workers=args.workers)
        print(f"p={p}: slope {res['slope']:.3f}  (upper-bound rate {-(p - 1):.1f}, lambda_(m+1) rate {-p:.1f})")
        for m, e in zip(res["m_grid"], res["median_error"]):
            print(f"   m={m:4d}  median error {e:.4e}")
        out[str(p)] = {k: v for k, v in res.items() if k != "rows"}
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
