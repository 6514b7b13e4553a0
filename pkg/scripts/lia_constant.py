"""Empirical LIA constant |slope| / (|C| |MC|) on spheres in R^4 versus mesh level.

Also prints the direction error on the bumped sphere, which leaves R^3 x {0}.
"""
import argparse

import numpy as np

from vortexmem import biotsavart as bs
from vortexmem import fixtures as fx


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--levels", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--decades", type=float, default=1.0)
    args = ap.parse_args()
    print("level  C4(r=1)   C4(r=2)   residual  bumped-dir-deg")
    for level in args.levels:
        row = []
        for r in (1.0, 2.0):
            mem = fx.icosphere4d(r, level)
            row.append(bs.lia_slope(mem, 0, bs.default_eps_list(mem.mesh_size(), args.decades, 6), max_residual=1.0))
        bumped = fx.bumped_sphere4d(level)
        q = int(np.argmin(np.linalg.norm(bumped.vertices[:, :3] - [0.6, 0.3, 0.7], axis=1)))
        rb = bs.lia_slope(bumped, q, bs.default_eps_list(bumped.mesh_size(), args.decades, 6), max_residual=1.0)
        print(f"{level:5d}  {row[0].magnitude_ratio:.5f}   {row[1].magnitude_ratio:.5f}   "
              f"{row[0].fit_residual:.4f}    {rb.direction_error_deg:.2f}")
    print(f"reference 1/(2 pi) = {1 / (2 * np.pi):.5f}")


if __name__ == "__main__":
    main()
