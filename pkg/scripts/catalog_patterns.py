"""Second-order Artin patterns of all catalog groups and of the coclass-1 family up to order 3^N."""

import argparse

from towerlab.artin import artin_pattern
from towerlab.blackburn import all_params, construct
from towerlab.catalog import builtin_entries, identify


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=6)
    args = ap.parse_args()
    for e in builtin_entries():
        src = str(e.params) if e.params else e.kind
        print(f"{e.id:>9}  {src:<16} {e.ap2}")
    print()
    for n in range(3, args.n_max + 1):
        for P in all_params(n):
            G = construct(P)
            ids = identify(G, 2)
            print(f"{str(P):<12} {artin_pattern(G, 2)}  {', '.join(ids) or '-'}")


if __name__ == "__main__":
    main()
