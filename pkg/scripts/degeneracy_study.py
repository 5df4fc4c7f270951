"""Noise temperature of the pumped loop near and at the degenerate point.

Prints, per observation frequency, the aperture-sum temperature, the p=0-only
temperature, and the covariance-path temperature. Off degeneracy the two full
paths agree; at exactly half the pump frequency the aperture sum counts the
coincident p=0 and p=-1 noise twice while the diagonal covariance counts it once.
"""

import argparse
import math

from xfreq_noise.noisecore import SpectralEnvironment, flat
from xfreq_noise.pamp import TVCircuitModel, aperture_spectrum, aperture_sum_temperature, covariance_noise_temperature


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T-b", type=float, default=290.0, help="flat brightness temperature, K")
    ap.add_argument("--offsets-khz", type=float, nargs="+", default=[-500, -50, -5, -0.5, 0, 0.5, 5, 50, 500])
    args = ap.parse_args(argv)
    model = TVCircuitModel()
    env = SpectralEnvironment(flat(args.T_b))
    print(f"{'offset_kHz':>10} {'T_sum':>14} {'T_p0':>14} {'ratio':>8} {'T_cov':>14} {'A-1/A0':>8}")
    for off in args.offsets_khz:
        w = model.design_freq + 2 * math.pi * off * 1e3
        aps = aperture_spectrum(model, [w])[0].apertures
        Ts = aperture_sum_temperature(aps, env)
        T0 = aperture_sum_temperature(aps, env, p_set=[0])
        Tc = covariance_noise_temperature(model, w, env)
        print(f"{off:10.1f} {Ts:14.6g} {T0:14.6g} {Ts / T0:8.4f} {Tc:14.6g} {aps.mean[-1] / aps.mean[0]:8.4f}")


if __name__ == "__main__":
    main()
