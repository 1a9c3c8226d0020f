#!/usr/bin/env python3
"""Square-root staffing: asymptotic vs exact slack parameter.

For a target delay probability epsilon, gamma_star solves the limiting
equation T1(gamma) = epsilon once, independent of s; gamma_opt(s) inverts the
exact finite-s delay probability.  The gap decays like 1/sqrt(s).
"""

import argparse
import math

from qedctrl import gamma_star, optimality_gap, parse_policy


def run(policy_str: str, epsilon: float) -> None:
    policy = parse_policy(policy_str)
    gs = gamma_star(policy, epsilon)
    print(f"gamma_star = {gs:.6f}   (policy {policy_str}, epsilon {epsilon})")
    print("s,gamma_opt,gap,gap_times_sqrt_s")
    for s in (25, 50, 100, 200, 400, 800, 1600):
        res = optimality_gap(policy, s, epsilon)
        print(f"{s},{res['gamma_opt']:.6f},{res['gap']:.6f},"
              f"{res['gap'] * math.sqrt(s):.4f}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--policy", default="erlangC")
    parser.add_argument("--epsilon", type=float, default=0.5)
    args = parser.parse_args()
    run(args.policy, args.epsilon)
