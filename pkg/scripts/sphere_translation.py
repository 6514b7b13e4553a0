"""Speed of the skew-mean-curvature flow on round spheres in R^4 for several levels and radii."""
import argparse

import numpy as np

from vortexmem import fixtures as fx
from vortexmem import membrane_flow as mf


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--levels", type=int, nargs="+", default=[1, 2, 3, 4])
    args = ap.parse_args()
    for r in (0.5, 1.0, 2.0):
        for level in args.levels:
            v = mf.skew_mc_velocity(fx.icosphere4d(r, level))
            speed = np.linalg.norm(v, axis=1)
            print(f"r={r:3.1f} level={level}  speed*r: min {speed.min() * r:.5f} max {speed.max() * r:.5f}")


if __name__ == "__main__":
    main()
