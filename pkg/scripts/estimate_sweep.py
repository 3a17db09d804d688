"""Ratio lhs/rhs of the weighted a-priori estimate over a gamma-doubling sweep.

A glancing plane wave drives the Neumann wave problem.  With s = 1/2 the
ratio stays in a narrow band; with s = 0 it grows as gamma decreases.

Usage: python scripts/estimate_sweep.py [--K 1024]
"""

import argparse

import numpy as np

from hypbc.halfspace import SobolevParams, SpaceTimeGrid, solve, verify_weighted_estimate
from hypbc.models import get_preset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--K", type=float, default=1024.0, help="tangential wave number")
    ap.add_argument("--nt", type=int, default=8192)
    args = ap.parse_args()
    p = get_preset("wave_neumann")
    K = args.K
    print(f"{'gamma':>6} {'ratio s=1/2':>14} {'ratio s=0':>14}")
    for gamma in (2, 4, 8, 16, 32, 64, 128):
        grid = SpaceTimeGrid(args.nt, (4,), 256, 14.0, (2 * np.pi / K,), 20.0 / gamma)
        t = grid.t[:, None]
        y = (np.arange(4) * grid.spacings[1])[None, :]
        g = (np.exp(-0.5 * ((t - 4.0) / 0.15) ** 2 + 1j * K * t) * np.exp(1j * K * y))[None]
        sol = solve(p.system, p.B, None, g, grid, SobolevParams(0, gamma), cutoff=1e-13)
        half = verify_weighted_estimate(p.system, p.B, None, g, grid, gamma, 0.5, solution=sol)[2]
        zero = verify_weighted_estimate(p.system, p.B, None, g, grid, gamma, 0.0, solution=sol)[2]
        print(f"{gamma:>6} {half:>14.6g} {zero:>14.6g}")


if __name__ == "__main__":
    main()
