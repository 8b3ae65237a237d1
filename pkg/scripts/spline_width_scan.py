"""Rank set and smallest Gram eigenvalue of (phi_1, phi_2, phi_3) across box widths.

At an integer width every translate of the transforms except the central one
vanishes at xi = 0, so the rank drops to 1 there.

    python3 scripts/spline_width_scan.py
"""

import sys

import numpy as np

from shiftframes.spectral import GridSpec, cached_rank_profile, classify
from shiftframes.spline import spline_family


def main():
    spec = GridSpec(n=1024)
    print(f"{'a':>6}  {'class':10}  {'ranks':8}  {'min eig':>10}")
    for a in (0.25, 0.5, 0.75, 0.9, 1.0, 1.1, 1.5, 2.0):
        fam = spline_family(1, 3, a)
        rep = classify(fam, spec)
        prof = cached_rank_profile(fam, spec)
        lmin = float(np.min(prof.min_eig))
        print(f"{a:6.2f}  {rep.classification:10}  {str(rep.distinct_ranks):8}  {lmin:10.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
