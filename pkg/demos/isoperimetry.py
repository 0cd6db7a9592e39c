"""Minimal perimeters of polyiamonds by brute force next to the standard-shape formula.

    python demos/isoperimetry.py [--max-area 11]
"""

import argparse
from collections import Counter

from hexmeta.polyiamond import (
    Polyiamond,
    edge_perimeter,
    enumerate_polyiamonds,
    is_quasi_regular,
    quasi_regular_index,
    standard_decomposition,
    standard_perimeter,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-area", type=int, default=11)
    a = ap.parse_args()

    print(" A  shapes  min p  formula  (r,i,k)   minimizers")
    for A in range(1, a.max_area + 1):
        polys = [Polyiamond.of(s) for s in enumerate_polyiamonds(A)]
        perims = Counter(edge_perimeter(P) for P in polys)
        pmin = min(perims)
        d = standard_decomposition(A)
        note = ""
        if quasi_regular_index(A):
            qr = sum(is_quasi_regular(P) and edge_perimeter(P) == pmin for P in polys)
            note = f"  quasi-regular: {qr} of {perims[pmin]}"
        print(f"{A:2d} {len(polys):7d} {pmin:6d} {standard_perimeter(A):8d}  {(d.r, d.i, d.k)!s:9} {perims[pmin]:5d}{note}")


if __name__ == "__main__":
    main()
