"""Energy slope per volume for circles, spheres and ellipsoids; shows the cutoff staircase."""
import argparse

import numpy as np

from vortexmem import biotsavart as bs
from vortexmem import energy as en
from vortexmem import fixtures as fx


def report(name, obj, h, decades, count):
    fit = en.energy_slope(obj, bs.default_eps_list(h, decades, count), max_residual=1.0)
    print(f"{name:28s} slope/vol*4pi = {fit.slope_per_volume * 4 * np.pi:.4f}  residual = {fit.fit_residual:.4f}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--level", type=int, default=4)
    args = ap.parse_args()
    for n, dec, cnt in ((512, 1.0, 6), (2048, 1.0, 6), (2048, 2.0, 11)):
        report(f"circle n={n} {dec:g} decades", fx.circle(n), 2 * np.pi / n, dec, cnt)
    for name, mem in (("sphere", fx.icosphere4d(1.0, args.level)),
                      ("ellipsoid (1,1,0.5)", fx.icosphere4d(1.0, args.level, axes=(1.0, 1.0, 0.5)))):
        report(f"{name} level {args.level}", mem, mem.mesh_size(), 1.0, 6)


if __name__ == "__main__":
    main()
