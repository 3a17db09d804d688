"""Estimate the loss power for every preset and print a summary table.

Usage: python scripts/power_sweep.py [--samples 256] [--seed 0]
"""

import argparse

from hypbc.lopatinskii import estimate_power
from hypbc.models import PRESETS, get_preset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=256)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'preset':<18} {'expected':>8} {'s_hat':>9} {'r2':>10}")
    for name in PRESETS:
        p = get_preset(name)
        est = estimate_power(p.system, p.B, freq_samples=args.samples, seed=args.seed,
                             worst_case=p.closed_forms.worst_case if p.closed_forms else None)
        print(f"{name:<18} {p.expected_power:>8.3f} {est.s_hat:>9.5f} {est.regression_r2:>10.6f}")


if __name__ == "__main__":
    main()
