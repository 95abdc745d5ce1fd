#!/usr/bin/env python3
"""Solve the limit MGF system over a range of rho and report solver diagnostics.

Writes results/mgf/mgf_rho<rho>.csv (theta, M_R, M_B) and prints, per rho, the
iteration count, the pinned residual, the discretisation defect and the error
of the mean read off the slope at zero.
"""
import sys
from pathlib import Path

from nwfpp import mgf
from nwfpp.experiments import write_csv
from nwfpp.theory import constants

RHOS = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)


def main(out="results/mgf"):
    Path(out).mkdir(parents=True, exist_ok=True)
    print(f"{'rho':>5} {'iters':>6} {'residual':>10} {'defect':>10} {'|mean-u_B|':>11}")
    for rho in RHOS:
        k = constants(rho)
        t = mgf.solve(k)
        write_csv(Path(out) / f"mgf_rho{rho:g}.csv", ["theta", "M_R", "M_B"], zip(t.theta, t.M_R, t.M_B))
        print(f"{rho:5g} {len(t.history):6d} {t.residual:10.2e} {mgf.residual(t):10.2e} "
              f"{abs(t.mean('M_B') - k.u_B):11.2e}")


if __name__ == "__main__":
    main(*sys.argv[1:])
