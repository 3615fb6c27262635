"""Held-out loss of restricted classifiers at m/2, m, 2m landmarks (m = ceil(N^(2p/(p^2-1)))) against the full one."""

import argparse
import json

from nystromlab.experiments import generalization_experiment, trial_seeds


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=2000)
    ap.add_argument("--p", type=float, default=2.8)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--loss", default="logistic", choices=("logistic", "squared"))
    ap.add_argument("--master-seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--out")
    args = ap.parse_args()

    res = generalization_experiment(args.N, args.p, trial_seeds(args.master_seed, args.seeds), args.workers,
                                    loss=args.loss)
    print(f"recommended m = {res['recommended_m']}")
    for m, g in res["median_gap"].items():
        print(f"  m={m:5d}  median test-loss gap {g:+.5f}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(res, fh, indent=1)


if __name__ == "__main__":
    main()
