"""Circulation around small loops linking (or not) a sphere in R^4, by loop radius."""
import argparse

import numpy as np

from vortexmem import biotsavart as bs
from vortexmem import fixtures as fx


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--level", type=int, default=3)
    ap.add_argument("--radii", type=float, nargs="+", default=[0.2, 0.1, 0.05])
    args = ap.parse_args()
    mem = fx.icosphere4d(1.0, args.level)
    print("radius  linking   flipped   shifted")
    for r in args.radii:
        loop = bs.linking_loop(mem, 5, r)
        vals = (bs.circulation(mem, loop), bs.circulation(mem.flipped(), loop),
                bs.circulation(mem, loop + np.array([0, 0, 0, 0.3])))
        print(f"{r:6.3f}  " + "  ".join(f"{v:+.5f}" for v in vals))


if __name__ == "__main__":
    main()
