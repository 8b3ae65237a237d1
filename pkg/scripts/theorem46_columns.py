"""Nonzero translates and rank of the shifted matrix for the theta/tau/omega families.

For r = 2 only three translates meet a support on (eps, pi - eps), which caps
the rank at 3 there while it is 4 elsewhere.

    python3 scripts/theorem46_columns.py
"""

import sys

import numpy as np

from shiftframes.generators import family_theorem_4_6
from shiftframes.spectral import numeric_rank, shifted_matrix_at


def main():
    xs = np.linspace(-np.pi, np.pi, 17)[:-1] + 0.05
    for r in (1, 2, 3):
        fam = family_theorem_4_6(r, 0.2)
        print(f"r={r} ({fam.r} generators, target rank {2 * r})")
        for xi in xs:
            S = shifted_matrix_at(fam, xi)
            print(f"  xi={xi:+.3f}  columns={S.columns}  rank={numeric_rank(S.entries)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
