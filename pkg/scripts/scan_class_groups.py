"""3-class group statistics of imaginary quadratic fields, as CSV."""

import argparse
import sys
import time

from towerlab.quadratic import default_threads, scan


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--min", type=int, default=-10**6)
    ap.add_argument("--threads", type=int, default=default_threads())
    args = ap.parse_args()
    t = time.time()
    rep = scan(args.min, threads=args.threads)
    sys.stdout.write(rep.to_csv())
    print(f"# {time.time() - t:.1f}s, reconciles={rep.reconciles()}", file=sys.stderr)
    return 0 if rep.matches() else 1


if __name__ == "__main__":
    sys.exit(main())
