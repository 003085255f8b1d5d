"""Print the maximal-subgroup types of every tabulated G_a^n(z,w), n = 3..N."""

import argparse
import sys
import time

from towerlab.blackburn import table_rows, verify_maximal_subgroups


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    args = ap.parse_args()
    bad = 0
    for n in range(3, args.n_max + 1):
        t = time.time()
        for P in table_rows(n):
            r = verify_maximal_subgroups(P)
            bad += not r.ok
            print(r)
        print(f"# n = {n}: {time.time() - t:.1f}s")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
