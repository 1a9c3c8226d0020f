#!/usr/bin/env python3
"""Delay probability as a function of the admission parameter p.

Sweeps the geometric-drift global control f(x) = p^x between the loss-system
limit (p -> 0) and the delay-system limit (p -> 1), printing the exact delay
probability, its local-control counterpart, and the two-term corrected
approximation as CSV.
"""

import argparse
import math

from qedctrl import SystemParams, const_local, corrected_delay, delay_prob, drift_global


def run(s: int, rho: float, points: int) -> None:
    params = SystemParams.from_rho(s, rho)
    print("p,D_global_exact,D_local_exact,D_corrected")
    for i in range(1, points + 1):
        p = i / (points + 1)
        pol_g = drift_global(p)
        pol_l = const_local(p)
        _, _, approx = corrected_delay(pol_g, params)
        print(f"{p:.6f},{delay_prob(pol_g, params):.6f},"
              f"{delay_prob(pol_l, params):.6f},{approx:.6f}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--s", type=int, default=100)
    parser.add_argument("--rho", type=float, default=0.99)
    parser.add_argument("--points", type=int, default=50)
    args = parser.parse_args()
    if not 0.0 <= args.rho or args.rho >= 1.0 + 1.0 / math.sqrt(args.s):
        parser.error("rho out of range")
    run(args.s, args.rho, args.points)
