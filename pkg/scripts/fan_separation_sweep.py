#!/usr/bin/env python3
"""Refuter chain counts for pairs of fans at increasing pole spacing.

Close fans are crossed by long chains of strips dual to the radial ray
between them; the count drops to zero once the spacing clears pi + 1.
Prints CSV: spacing, budget, max_chain, assumed_separation.
"""

import argparse
import csv
import sys

from parkinglot import chains as ch
from parkinglot.curtains import fan


def main(argv=None):
    ap = argparse.ArgumentParser(description="fan separation sweep")
    ap.add_argument("--spacings", default="1.1,1.5,2,3,4,4.5,5,6")
    ap.add_argument("--budget", type=int, default=3000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["spacing", "budget", "max_chain", "assumed_separation"])
    for s in (float(v) for v in a.spacings.split(",")):
        h1, h2 = fan(0.0), fan(s)
        rep = ch.separation_refuter(h1, h2, ch.default_family(h1, h2), a.budget, seed=a.seed)
        out.writerow([s, a.budget, rep.max_chain, rep.assumed_separation])
    return 0


if __name__ == "__main__":
    sys.exit(main())
