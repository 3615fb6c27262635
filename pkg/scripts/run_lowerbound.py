"""Random-sign witness kernel: top eigenvalues in the band [N/(2(m+1)), 3N/(2(m+1))] and error above the lower bound."""

import argparse

from nystromlab.experiments import lowerbound_trial, run_trials, trial_seeds


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=4096)
    ap.add_argument("--m", type=int, default=5)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--samplings", type=int, default=10)
    ap.add_argument("--master-seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    trials = run_trials(lambda s: lowerbound_trial(args.N, args.m, s, args.samplings),
                        trial_seeds(args.master_seed, args.seeds), args.workers)
    lo = trials[0]["lower_general"]
    in_band = [t for t in trials if t["in_band"]]
    above = sum(t["median_error"] >= lo - 1e-6 for t in in_band)
    print(f"lower bound N/(2(m+1)) = {lo:.3f}")
    print(f"in band: {len(in_band)}/{len(trials)}; error above bound among those: {above}/{len(in_band)}")


if __name__ == "__main__":
    main()
