"""Explicit RK4 on the binormal flow: length drift versus dt / h^2."""
import argparse
import logging

import numpy as np

from vortexmem import filament3d as fl
from vortexmem import fixtures as fx


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--vertices", type=int, default=128)
    ap.add_argument("--steps", type=int, default=300)
    args = ap.parse_args()
    logging.basicConfig(level=logging.ERROR)
    c = fx.perturbed_circle(args.vertices, seed=0)
    h = np.min(np.linalg.norm(c.edges(), axis=1))
    for ratio in (0.25, 0.5, 0.7, 0.9, 1.2):
        dt = ratio * h * h
        with np.errstate(all="ignore"):
            run = fl.evolve_filament(c, dt, args.steps)
        print(f"dt/h^2 = {ratio:4.2f}  length drift {run.length_drift:.3e}")


if __name__ == "__main__":
    main()
