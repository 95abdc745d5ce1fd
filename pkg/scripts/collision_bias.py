#!/usr/bin/env python3
"""Finite-n drift of the normalised collision count.

For each n, averages (fresh collisions in [-1/lam, 1/lam]) / (W_U^(n) W_V^(n))
over independent graph/pair instances and prints the ratio to the limit value.
Usage: python3 scripts/collision_bias.py [n ...]   (default 1e4 1e5)
"""
import math
import sys

import numpy as np

from nwfpp.experiments import collision_rep
from nwfpp.theory import constants

RHO = 2.0


def main(ns):
    k = constants(RHO)
    s0, s1 = -1.0 / k.lam, 1.0 / k.lam
    target = k.collision_factor * (math.exp(k.lam * s1) - math.exp(k.lam * s0)) / k.lam
    for n in ns:
        reps = max(4, int(2e6 // n))
        vals = []
        for rep in range(reps):
            for rec in collision_rep(RHO, n, rep, 50, 7, s0, s1):
                if not rec["direct"]:
                    vals.append(rec["count"] / (rec["w_u"] * rec["w_v"]))
        vals = np.array(vals)
        se = vals.std(ddof=1) / math.sqrt(vals.size)
        print(f"n={n:>8d} instances={vals.size:5d} ratio={vals.mean() / target:.3f} +- {se / target:.3f}",
              flush=True)


if __name__ == "__main__":
    main([int(float(x)) for x in sys.argv[1:]] or [10**4, 10**5])
