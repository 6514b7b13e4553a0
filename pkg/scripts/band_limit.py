"""Thin-band sheets on the sphere approach the filament form on the equator."""
import argparse

import numpy as np

from vortexmem import fixtures as fx
from vortexmem import symplectic as sy
from vortexmem.acceptance import smooth_test_fields


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--level", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    eq = fx.circle(1024)
    ref = sy.mw_form_curve(eq, *smooth_test_fields(eq.points, args.seed))
    for width in (0.6, 0.3, 0.15, 0.075, 0.0375):
        sheet = fx.sphere_band_sheet(width, level=args.level)
        val = sy.sheet_form(sheet, *smooth_test_fields(sheet.mesh.vertices, args.seed))
        print(f"width {width:7.4f}  relative error {abs(val / ref - 1):.4f}")


if __name__ == "__main__":
    main()
