"""Sub-root fixed point eps_tilde for normalized spectra i^-p as N grows; ln eps_tilde^2 vs ln N."""

import argparse

import numpy as np

from nystromlab.experiments import loglog_slope
from nystromlab.spectrum import sub_root_fixed_point
from nystromlab.synth import power_law_spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--N", type=int, nargs="+", default=[1000, 10000, 100000])
    args = ap.parse_args()

    eps = []
    for N in args.N:
        e = sub_root_fixed_point(power_law_spectrum(N, args.p, scale_N=True), N, normalized=True)
        eps.append(e)
        print(f"N={N:7d}  eps_tilde={e:.6e}")
    print(f"slope of ln eps^2: {loglog_slope(args.N, np.square(eps)):.4f} (reference {-args.p / (args.p + 1):.4f})")


if __name__ == "__main__":
    main()
