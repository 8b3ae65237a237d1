"""Classify every shipped config and print the verdict table.

    python3 scripts/theorem_table.py [--out table.csv]
"""

import argparse
import csv
import sys
from pathlib import Path

from shiftframes.configs import load_family
from shiftframes.spectral import GridSpec, classify, lemma2_tests

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=None)
    ap.add_argument("--grid-n", type=int, default=2048)
    args = ap.parse_args()
    spec = GridSpec(n=args.grid_n)
    rows = []
    for path in sorted((ROOT / "configs").glob("*.json")):
        fam, _ = load_family(path)
        rep = classify(fam, spec)
        l2 = lemma2_tests(fam, spec)
        rows.append(
            {
                "config": path.stem,
                "r": fam.r,
                "classification": rep.classification,
                "expect": fam.expect or "",
                "met": "" if rep.expectation_met is None else ("yes" if rep.expectation_met else "NO"),
                "ranks": " ".join(map(str, rep.distinct_ranks)),
                "equiv": "".join(
                    "T" if l2[k] else "F"
                    for k in ("shifted_rank_constant", "gram_rank_constant", "condition_constant_finite")
                ),
                "C": f"{rep.gram_condition_constant:.4g}",
            }
        )
    cols = list(rows[0])
    widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols}
    print("  ".join(c.ljust(widths[c]) for c in cols))
    for r in rows:
        print("  ".join(str(r[c]).ljust(widths[c]) for c in cols))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, cols, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
