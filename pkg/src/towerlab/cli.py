"""Command-line interface: ``towerlab <subcommand> ...``.

Exit codes: 0 success, 1 verification mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catalog
from .abelian import format_ati
from .artin import artin_pattern, parse_pattern
from .blackburn import BlackburnParams, all_params, construct, table_rows, verify_maximal_subgroups, verify_power_lemma
from .pcgroup import PcPresentation, PresentationError
from .pctext import load_presentation
from .quadratic import THREADS_ENV, default_threads, json_lines, scan

OK, MISMATCH, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_group(spec: str) -> PcPresentation:
    """``o.i`` (catalog id), ``G(a,n,z,w)`` (coclass-1 family) or ``@file.pc``."""
    spec = spec.strip()
    if spec.startswith("@"):
        path = Path(spec[1:])
        if not path.is_file():
            raise UsageError(f"no such presentation file: {path}")
        try:
            return load_presentation(path)
        except PresentationError as e:
            raise UsageError(f"{path}: {e}") from e
    if spec.startswith("G("):
        try:
            return construct(BlackburnParams.parse(spec))
        except ValueError as e:
            raise UsageError(str(e)) from e
    try:
        catalog.parse_id(spec)
        entry = catalog.get_entry(spec)
    except (ValueError, KeyError) as e:
        raise UsageError(f"invalid group spec {spec!r}: expected o.i, G(a,n,z,w) or @file.pc") from e
    G = entry.group()
    if G is None:
        raise UsageError(f"catalog entry {spec} has no stored presentation (fingerprint only)")
    return G


def _out(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ----------------------------------------------------------------------
# subcommands


def cmd_pattern(args) -> int:
    G = parse_group(args.group)
    ap = artin_pattern(G, args.order, layer_order=args.layer_order)
    if args.format == "json":
        _out(ap.to_json())
    else:
        _out(str(ap))
    if args.expect:
        from .artin import ap_equivalent

        try:
            want = parse_pattern(args.expect)
        except ValueError as e:
            raise UsageError(str(e)) from e
        if not ap_equivalent(ap.truncate(2), want):
            _out(f"MISMATCH: expected a pattern equivalent to {args.expect}")
            return MISMATCH
        _out("match")
    return OK


def cmd_identify(args) -> int:
    if (args.group is None) == (args.pattern is None):
        raise UsageError("give exactly one of --group or --pattern")
    if args.group is not None:
        G = parse_group(args.group)
        ids = catalog.identify(G, 2)
        subs = catalog.maximal_subgroup_multiset(G) if args.subgroups else None
    else:
        try:
            ap = parse_pattern(args.pattern)
        except ValueError as e:
            raise UsageError(str(e)) from e
        ids = catalog.identify_pattern(ap, args.group_order)
        subs = None
    if args.format == "json":
        d = {"candidates": ids}
        if subs is not None:
            d["maximal_subgroups"] = dict(sorted(subs.items()))
        _out(json.dumps(d, indent=2))
    else:
        _out("candidates: " + (", ".join(ids) if ids else "none"))
        if subs is not None:
            _out("maximal subgroups: " + ", ".join(f"{k} x{v}" for k, v in sorted(subs.items())))
    if args.expect is not None:
        want = sorted(x for x in args.expect.split(",") if x)
        if sorted(ids) != want:
            _out(f"MISMATCH: expected {','.join(want)}")
            return MISMATCH
    return OK


def cmd_blackburn_verify(args) -> int:
    if not 3 <= args.n_min <= args.n_max:
        raise UsageError("need 3 <= --n-min <= --n-max")
    if args.n_max > 8:
        raise UsageError("--n-max is limited to 8 (groups of order at most 3^8)")
    bad = 0
    for n in range(args.n_min, args.n_max + 1):
        for P in table_rows(n):
            rep = verify_maximal_subgroups(P)
            bad += not rep.ok
            _out(str(rep))
    _out(f"{'all rows confirmed' if not bad else f'{bad} mismatching rows'}")
    return MISMATCH if bad else OK


def cmd_lemma_verify(args) -> int:
    if args.n_max < 3 or args.n_max > 8:
        raise UsageError("--n-max must lie in [3, 8]")
    bad = 0
    targets: list[tuple[str, PcPresentation]] = []
    for n in range(3, args.n_max + 1):
        targets += [(str(P), construct(P)) for P in all_params(n)]
    for gid in ("243.5", "243.7"):
        targets.append((gid, catalog.get_entry(gid).group()))
    for name, G in targets:
        rep = verify_power_lemma(G, G.gen(0), G.gen(1))
        if rep.applicable and not rep.ok:
            bad += 1
        _out(f"{name}: {rep}")
    _out("all applicable groups confirmed" if not bad else f"{bad} groups fail")
    return MISMATCH if bad else OK


def cmd_scan(args) -> int:
    if args.min >= 0:
        raise UsageError("--min must be negative")
    if args.threads < 1:
        raise UsageError("--threads must be positive")
    if args.emit == "jsonl":
        rep, rows = scan(args.min, threads=args.threads, block=args.block, records=True)
        for line in json_lines(rows):
            _out(line)
    else:
        rep = scan(args.min, threads=args.threads, block=args.block)
        if args.emit == "csv":
            sys.stdout.write(rep.to_csv())
        else:
            _out(json.dumps(rep.to_dict(), indent=2))
    return OK if rep.matches() and rep.reconciles() else MISMATCH


def cmd_catalog(args) -> int:
    if args.export:
        _out(catalog.export_json())
        return OK
    if args.log:
        for line in catalog.resolution_log():
            _out(line)
        return OK
    if args.show:
        try:
            e = catalog.get_entry(args.show)
        except KeyError as err:
            raise UsageError(str(err)) from err
        _out(json.dumps(e.to_dict(), indent=2))
        return OK
    for e in catalog.builtin_entries():
        src = str(e.params) if e.params else e.kind
        _out(f"{e.id:>9}  {src:<16} {e.ap2}")
    return OK


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="towerlab", description="Artin patterns of finite 3-groups and 3-class groups of imaginary quadratic fields.")
    sub = ap.add_subparsers(dest="command", required=True)
    group_help = "group: catalog id o.i, family member G(a,n,z,w), or @file.pc"

    p = sub.add_parser("pattern", help="compute an Artin pattern", description="Compute the Artin pattern (iterated abelian quotient invariants and transfer kernels) of a group; with --expect, check it against a given order-2 pattern up to relabelling.")
    p.add_argument("--group", required=True, help=group_help)
    p.add_argument("--order", type=int, default=2, choices=range(1, 5), help="pattern order (default 2)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--layer-order", choices=("auto", "lex"), default="auto", help="first-layer ordering")
    p.add_argument("--expect", help="order-2 pattern display to compare with, e.g. '([1^2;(21,21,1^3,21)],[1;(2241)])'")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("identify", help="identify a group from its Artin pattern", description="Identify a group, or an order-2 pattern, against the built-in catalog; candidate sets are reported when the pattern does not determine the group.")
    p.add_argument("--group", help=group_help)
    p.add_argument("--pattern", help="order-2 pattern display")
    p.add_argument("--group-order", type=int, help="restrict --pattern matches to this group order")
    p.add_argument("--subgroups", action="store_true", help="also report the multiset of maximal subgroups")
    p.add_argument("--expect", help="comma-separated ids that must be exactly the candidates")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("blackburn-verify", help="check the maximal-subgroup tables of the coclass-1 family", description="Verify the tabulated isomorphism types of the maximal subgroups H1..H4 of every G_a^n(z,w): abelian types for n = 3, family members of order 3^(n-1) for H2..H4 and an abelian H1 of order 3^(n-1) when a = 0.")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=8)
    p.set_defaults(func=cmd_blackburn_verify)

    p = sub.add_parser("lemma-verify", help="check the power identities for xy and xy^2", description="Verify by collection the squares and cubes of xy and xy^2 in every family member with n <= N satisfying the hypotheses (t3 central of order 3, [s3,y] = 1), and in <243,5> and <243,7>.")
    p.add_argument("--n-max", type=int, default=8)
    p.set_defaults(func=cmd_lemma_verify)

    p = sub.add_parser("scan", help="3-class group statistics of imaginary quadratic fields", description=f"Count fundamental discriminants L < d < 0 by divisibility of h by 3, 3-rank and cyclic 3-class group order, and compare with the cited counts for L = -10^6. The default thread count comes from ${THREADS_ENV}.")
    p.add_argument("--min", type=int, required=True, help="lower bound L < 0")
    p.add_argument("--threads", type=int, default=default_threads(), help=f"worker processes (default ${THREADS_ENV} or 1)")
    p.add_argument("--block", type=int, default=200_000, help="discriminants per work block")
    p.add_argument("--emit", choices=("csv", "json", "jsonl"), default="csv", help="csv/json summary or per-discriminant JSON lines")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("catalog", help="list or export the built-in group catalog", description="List catalog entries, show or export them as JSON with cited metadata, or print the log of how family parameters were matched.")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--show", metavar="ID")
    g.add_argument("--export", action="store_true")
    g.add_argument("--log", action="store_true")
    p.set_defaults(func=cmd_catalog)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"towerlab: error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
