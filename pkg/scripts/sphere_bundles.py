#!/usr/bin/env python3
"""Tabulate Euler number and first homology of circle bundles over the sphere.

For each winding k the clutching cocycle on the two-band cover is built,
its Euler number read off, and the abelianized fundamental group of the
total space printed. The k = 1 row is the Hopf fibration.
"""

import argparse

from tga import cech
from tga.bundle import abelianization, build_bundle, euler_number, pi1_presentation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-winding", type=int, default=5)
    ap.add_argument("--genus", type=int, default=0)
    args = ap.parse_args()
    cover = cech.band_cover(args.genus)
    print(f"{'winding':>8} {'euler':>6}  H1(total space)")
    for k in range(-args.max_winding, args.max_winding + 1):
        S = cech.make_cocycle(cover, {}, {("L", "U"): k})
        bundle = build_bundle({"kind": "surface", "genus": args.genus}, S)
        print(f"{k:>8} {euler_number(bundle):>6}  {abelianization(pi1_presentation(bundle))}")


if __name__ == "__main__":
    main()
