"""|B z| along the worst-case sequence of the oblique-derivative problem.

Prints |Bz|/gamma (tends to sqrt(1 + |b|^2)) and |Bz|/gamma^0.9.

Usage: python scripts/oblique_sequence.py [--b 1.0] [--nmax 40]
"""

import argparse

import numpy as np

from hypbc.models import get_preset, oblique_sequence, wave_q


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b", type=float, nargs="+", default=[1.0])
    ap.add_argument("--nmax", type=int, default=40)
    args = ap.parse_args()
    b = np.asarray(args.b)
    p = get_preset("wave_oblique", d=len(b) + 1, b=list(b))
    print(f"{'n':>3} {'gamma':>12} {'|Bz|/gamma':>12} {'|Bz|/gamma^0.9':>15}")
    for n in range(1, args.nmax + 1):
        g = 2.0**-n
        f = oblique_sequence(g, b)
        z = np.array([np.sqrt(wave_q(f)), -f.radius])
        bz = abs((p.B.matrix(f) @ z)[0])
        print(f"{n:>3} {g:>12.4e} {bz / g:>12.8f} {bz / g**0.9:>15.6f}")


if __name__ == "__main__":
    main()
