"""Filtered noise-temperature increase of the switched array versus slow-down factor M."""

import argparse
import math

import numpy as np

from xfreq_noise.tma import filtered_noise_temperature, reference_array


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--M", type=float, nargs="+", default=list(np.logspace(0.5, 4, 8)))
    ap.add_argument("--P-max", type=int, default=3)
    args = ap.parse_args(argv)
    w0 = 2 * math.pi * 300e6
    print(f"{'M':>10} " + " ".join(f"{'P=' + str(P):>8}" for P in range(1, args.P_max + 1)))
    for M in args.M:
        cfg = reference_array(M=M, order=args.P_max)
        row = [filtered_noise_temperature(cfg, w0, P).ratio_db for P in range(1, args.P_max + 1)]
        print(f"{M:10.2f} " + " ".join(f"{x:8.4f}" for x in row))


if __name__ == "__main__":
    main()
