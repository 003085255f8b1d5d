"""Library of small 3-groups with cited data, and identification by Artin pattern.

Entries come in three kinds:

* ``presentation``: an explicit pc presentation is stored;
* ``family``: the group is a member G_a^n(z, w) of the coclass-1 family, the
  parameters being found by matching computed patterns against cited ones;
* ``fingerprint``: only the cited second-order Artin pattern is known.

Cited numbers (relation ranks, type names, minimal discriminants,
frequencies) are stored verbatim and never recomputed.
"""

from __future__ import annotations

import json
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .abelian import aqi, format_ati
from .artin import ArtinPattern, ap_equivalent, artin_pattern, canonical_key, parse_pattern
from .blackburn import BlackburnParams, all_params, construct
from .isomorphism import EXHAUSTIVE_LIMIT, Undecided, find_isomorphism, group_data
from .pcgroup import PcPresentation, center, first_layer
from .pctext import format_presentation, parse_presentation

# ----------------------------------------------------------------------
# stored presentations

PRESENTATIONS: dict[str, str] = {
    "243.5": """
        gens: x y s2 s3 t3
        x^3 = s3
        y^3 = s3
        [y,x] = s2
        [s2,x] = s3
        [s2,y] = t3
    """,
    "243.7": """
        gens: x y s2 s3 t3
        x^3 = s3
        y^3 = s3^2
        [y,x] = s2
        [s2,x] = s3
        [s2,y] = t3
    """,
    "81.3": """
        gens: xi upsilon sigma2 tau
        xi^3 = tau
        [upsilon,xi] = sigma2
    """,
    "81.13": """
        gens: xi upsilon zeta sigma2
        xi^3 = sigma2
        [upsilon,xi] = sigma2
    """,
    "3.1": "gens: g1",
    "9.1": "gens: g1 g2\ng1^3 = g2",
    "9.2": "gens: g1 g2",
    "27.1": "gens: g1 g2 g3\ng1^3 = g2\ng2^3 = g3",
    "27.2": "gens: g1 g2 g3\ng1^3 = g3",
    "27.5": "gens: g1 g2 g3",
}

# ----------------------------------------------------------------------
# cited data

CITED: dict[str, dict] = {
    "243.5": {
        "ap2": "([1^2;(21,21,1^3,21)],[1;(2241)])",
        "d2": 2,
        "type": "D.10",
        "sigma": "Schur sigma-group",
        "abs_d_min_imaginary": 4027,
        "frequency_imaginary": [83353, 276375, 461925],
        "measure": "128/729",
        "d_min_real": 422573,
        "frequency_real": [13712, 415698, 481756],
        "measure_real": "1664/59049",
    },
    "243.7": {
        "ap2": "([1^2;(1^3,21,1^3,21)],[1;(4224)])",
        "d2": 2,
        "type": "D.5",
        "sigma": "Schur sigma-group",
        "abs_d_min_imaginary": 12131,
        "frequency_imaginary": [41398, 276375, 461925],
        "measure": "64/729",
        "d_min_real": 631769,
        "frequency_real": [6691, 415698, 481756],
        "measure_real": "832/59049",
    },
    "81.3": {"d2": 4, "aqi": "21"},
    "81.13": {"d2": 5, "aqi": "1^3"},
    "81.7": {
        "ap2": "([1^2;(1^3,1^2,1^2,1^2)],[1;(2000)])",
        "d2": 3,
        "sigma": "Schur+1 sigma-group",
        "d_min_real": 142097,
        "frequency_real": [122955, 415698, 481756],
        "measure_real": "1664/6561",
        "frequency_real_1e8": [10244, 34631],
        "maximal_subgroups": {"27.3": 1, "27.4": 2, "27.5": 1},
    },
    "81.8": {
        "ap2": "([1^2;(21,1^2,1^2,1^2)],[1;(2000)])",
        "d2": 3,
        "sigma": "Schur+1 sigma-group",
        "d_min_real": 32009,
        "frequency_real_1e8": [10514, 34631],
    },
    "81.10": {
        "ap2": "([1^2;(21,1^2,1^2,1^2)],[1;(1000)])",
        "d2": 3,
        "sigma": "Schur+1 sigma-group",
        "d_min_real": 72329,
        "frequency_real_1e8": [7104, 34631],
    },
    "27.3": {"d2": 4, "aqi": "1^2"},
    "27.4": {"d2": 2, "aqi": "1^2"},
    "27.5": {"aqi": "1^3"},
    "243.26": {"kappa": "0000"},
    "243.27": {"kappa": "1000"},
    "729.96": {"ap2": "([1^2;(32,1^2,1^2,1^2)],[1;(1000)])", "d_min_real": 790085, "frequency_real_1e8": [242, 34631]},
    "729.97": {"ap2": "([1^2;(32,1^2,1^2,1^2)],[1;(2000)])", "d_min_real": 494236, "frequency_real_1e8": [713, 34631], "shared_with": ["729.98"]},
    "729.98": {"ap2": "([1^2;(32,1^2,1^2,1^2)],[1;(2000)])", "d_min_real": 494236, "frequency_real_1e8": [713, 34631], "shared_with": ["729.97"]},
    "729.99": {"ap2": "([1^2;(2^2,1^2,1^2,1^2)],[1;(0000)])", "d_min_real": 62501, "frequency_real_1e7": [66, 2576]},
    "729.100": {"ap2": "([1^2;(2^2,1^2,1^2,1^2)],[1;(0000)])", "d_min_real": 152949, "frequency_real_1e7": [42, 2576]},
    "729.101": {"ap2": "([1^2;(2^2,1^2,1^2,1^2)],[1;(0000)])", "d_min_real": 252977, "frequency_real_1e7": [42, 2576]},
    "6561.616": {"ap2": "([1^2;(32,21,1^3,21)],[1;(1313)])", "d2": 2, "type": "E.6", "abs_d_min_imaginary": 15544, "frequency_imaginary": [760, 24476]},
    "6561.617": {"ap2": "([1^2;(32,21,1^3,21)],[1;(2313)])", "d2": 2, "type": "E.14", "abs_d_min_imaginary": 16627, "frequency_imaginary": [1572, 24476], "shared_with": ["6561.618"]},
    "6561.618": {"ap2": "([1^2;(32,21,1^3,21)],[1;(2313)])", "d2": 2, "type": "E.14", "abs_d_min_imaginary": 16627, "frequency_imaginary": [1572, 24476], "shared_with": ["6561.617"]},
    "6561.622": {"ap2": "([1^2;(32,21,21,21)],[1;(1231)])", "d2": 2, "type": "E.8", "abs_d_min_imaginary": 34867, "frequency_imaginary": [798, 24476]},
    "6561.620": {"ap2": "([1^2;(32,21,21,21)],[1;(2231)])", "d2": 2, "type": "E.9", "abs_d_min_imaginary": 9748, "frequency_imaginary": [1583, 24476], "shared_with": ["6561.624"]},
    "6561.624": {"ap2": "([1^2;(32,21,21,21)],[1;(2231)])", "d2": 2, "type": "E.9", "abs_d_min_imaginary": 9748, "frequency_imaginary": [1583, 24476], "shared_with": ["6561.620"]},
    "2187.284": {"ap2": "([1^2;(2^2,21,1^3,21)],[1;(0313)])", "d2": 3, "type": "c.18", "d_min_real": 534824, "frequency_real": [4318, 415698], "shared_with": ["2187.291"]},
    "2187.291": {"ap2": "([1^2;(2^2,21,1^3,21)],[1;(0313)])", "d2": 3, "type": "c.18", "d_min_real": 534824, "frequency_real": [4318, 415698], "shared_with": ["2187.284"]},
    "2187.307": {"ap2": "([1^2;(2^2,21,21,21)],[1;(0231)])", "d2": 3, "type": "c.21", "d_min_real": 540365, "frequency_real": [4377, 415698], "shared_with": ["2187.308"]},
    "2187.308": {"ap2": "([1^2;(2^2,21,21,21)],[1;(0231)])", "d2": 3, "type": "c.21", "d_min_real": 540365, "frequency_real": [4377, 415698], "shared_with": ["2187.307"]},
}

PROVENANCE = {
    "presentation": "explicit pc presentation",
    "family": "coclass-1 family member, parameters found by pattern matching",
    "fingerprint": "cited second-order Artin pattern only",
}


# ----------------------------------------------------------------------
# entries


def parse_id(text: str) -> tuple[int, int]:
    o, sep, i = text.strip().partition(".")
    if not sep or not o.isdigit() or not i.isdigit():
        raise ValueError(f"group id must look like 243.5, got {text!r}")
    return int(o), int(i)


@dataclass
class CatalogEntry:
    id: str
    kind: str
    metadata: dict = field(default_factory=dict)
    presentation_text: str | None = None
    params: BlackburnParams | None = None
    _ap2: ArtinPattern | None = field(default=None, repr=False)
    _group: PcPresentation | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return parse_id(self.id)[0]

    @property
    def index(self) -> int:
        return parse_id(self.id)[1]

    @property
    def provenance(self) -> str:
        return PROVENANCE[self.kind]

    def group(self) -> PcPresentation | None:
        if self._group is None:
            if self.presentation_text is not None:
                self._group = parse_presentation(self.presentation_text)
            elif self.params is not None:
                self._group = construct(self.params)
        return self._group

    @property
    def ap2(self) -> ArtinPattern | None:
        """Second-order pattern: computed when a group is stored, else cited."""
        if self._ap2 is None:
            G = self.group()
            if G is not None:
                self._ap2 = artin_pattern(G, 2)
            elif "ap2" in self.metadata:
                self._ap2 = parse_pattern(self.metadata["ap2"])
        return self._ap2

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "order": self.order,
            "kind": self.kind,
            "provenance": self.provenance,
            "ap2": str(self.ap2) if self.ap2 is not None else None,
            "metadata": self.metadata,
        }
        if self.params is not None:
            d["params"] = str(self.params)
        G = self.group()
        if G is not None:
            d["presentation"] = format_presentation(G)
        return d


def _clean(text: str) -> str:
    return "\n".join(line.strip() for line in text.strip().splitlines()) + "\n"


@lru_cache(maxsize=1)
def _resolved() -> tuple[dict[str, BlackburnParams], tuple[str, ...]]:
    """Family parameters of the entries whose identity is pinned by matching."""
    log: list[str] = []
    out: dict[str, BlackburnParams] = {}

    # order 81: cited patterns against the four table groups of order 3^4
    rows = [BlackburnParams(4, 0, z, w) for z, w in ((0, 0), (0, 1), (1, 0), (-1, 0))]
    pats = {P: artin_pattern(construct(P), 2) for P in rows}
    for gid in ("81.7", "81.8", "81.10"):
        cited = parse_pattern(CITED[gid]["ap2"])
        hits = [P for P in rows if ap_equivalent(pats[P], cited)]
        log.append(f"{gid}: pattern {CITED[gid]['ap2']} matches {', '.join(map(str, hits)) or 'nothing'}")
        if len(hits) == 1:
            out[gid] = hits[0]

    # order 27: multiplicities among the maximal subgroups of <81,7>
    if "81.7" in out:
        G = construct(out["81.7"])
        names = Counter()
        for S in first_layer(G):
            H = S.presentation()
            for w in (0, 1):
                if find_isomorphism(H, construct(BlackburnParams(3, 0, 0, w))) is not None:
                    names[BlackburnParams(3, 0, 0, w)] += 1
        for gid in ("27.3", "27.4"):
            mult = CITED["81.7"]["maximal_subgroups"][gid]
            hits = [P for P, c in names.items() if c == mult]
            log.append(f"{gid}: occurs {mult} times among maximal subgroups of 81.7, matches {', '.join(map(str, hits)) or 'nothing'}")
            if len(hits) == 1:
                out[gid] = hits[0]

    # order 243: non-abelian maximal subgroups of the order-729 family members
    # with pattern ([1^2;(2^2,1^2,1^2,1^2)],[1;(0000)]), split by kernel type
    target = parse_pattern(CITED["729.99"]["ap2"])
    fam5 = [BlackburnParams(5, 0, 0, w) for w in (0, 1, -1)]
    found: dict[str, set] = {"0000": set(), "1000": set()}
    for P in all_params(6):
        G = construct(P)
        if not ap_equivalent(artin_pattern(G, 2), target):
            continue
        for S in first_layer(G)[1:]:
            H = S.presentation()
            for Q in fam5:
                if find_isomorphism(H, construct(Q)) is not None:
                    k = artin_pattern(construct(Q), 2).kappa
                    key = "0000" if set(k.digits) == {0} else "1000"
                    found[key].add(Q)
                    break
    for gid, key in (("243.26", "0000"), ("243.27", "1000")):
        hits = sorted(found[key], key=lambda Q: (0, 1, -1).index(Q.w))
        log.append(f"{gid}: kernel type {key} among maximal subgroups, matches {', '.join(map(str, hits)) or 'nothing'}")
        if hits:
            # w = 1 and w = -1 give isomorphic groups; keep one representative
            out[gid] = hits[0]
    return out, tuple(log)


def resolution_log() -> list[str]:
    return list(_resolved()[1])


@lru_cache(maxsize=1)
def _entries() -> tuple[CatalogEntry, ...]:
    resolved, _ = _resolved()
    ids = list(PRESENTATIONS) + [g for g in CITED if g not in PRESENTATIONS]
    out = []
    for gid in sorted(set(ids), key=parse_id):
        meta = dict(CITED.get(gid, {}))
        if gid in PRESENTATIONS:
            out.append(CatalogEntry(gid, "presentation", meta, presentation_text=_clean(PRESENTATIONS[gid])))
        elif gid in resolved:
            out.append(CatalogEntry(gid, "family", meta, params=resolved[gid]))
        else:
            out.append(CatalogEntry(gid, "fingerprint", meta))
    return tuple(out)


def builtin_entries() -> list[CatalogEntry]:
    return list(_entries())


def get_entry(gid: str) -> CatalogEntry:
    for e in _entries():
        if e.id == gid:
            return e
    raise KeyError(f"no catalog entry {gid}")


# ----------------------------------------------------------------------
# fingerprints and identification


@dataclass(frozen=True)
class Fingerprint:
    order: int
    ap2: tuple
    exponent: int
    center: str
    census: tuple[tuple[int, int], ...]


def fingerprint(G: PcPresentation) -> Fingerprint:
    orders = group_data(G).orders if G.m else np.ones(1, dtype=np.int64)
    census = tuple(sorted(Counter(orders.tolist()).items()))
    Z = center(G)
    return Fingerprint(
        G.order,
        canonical_key(artin_pattern(G, 2)),
        int(orders.max()),
        format_ati(aqi(Z.presentation())),
        census,
    )


def identify_pattern(ap: ArtinPattern, order: int | None = None) -> list[str]:
    """Entries whose second-order pattern (and order, if given) match ``ap``."""
    out = []
    for e in _entries():
        if order is not None and e.order != order:
            continue
        if e.ap2 is not None and ap_equivalent(e.ap2.truncate(2), ap.truncate(2)):
            out.append(e.id)
    return out


def identify(G: PcPresentation, max_order_n: int = 2) -> list[str]:
    """Candidate ids for G: matching pattern of order ``max_order_n`` and order.

    Entries with a stored group are further filtered by the full fingerprint
    (exponent, centre, element-order census) and, when still several remain,
    by an isomorphism test.
    """
    ap = artin_pattern(G, max_order_n)
    out = []
    fp = None
    for e in _entries():
        if e.order != G.order or e.ap2 is None:
            continue
        H = e.group()
        if H is not None:
            other = artin_pattern(H, max_order_n) if max_order_n != 2 else e.ap2
            if not ap_equivalent(other, ap):
                continue
            fp = fp or fingerprint(G)
            if fingerprint(H) != fp:
                continue
            if G.order <= EXHAUSTIVE_LIMIT and find_isomorphism(G, H) is None:
                continue
            out.append(e.id)
        elif ap_equivalent(e.ap2, ap.truncate(2)):
            out.append(e.id)
    return out


def isomorphic(G: PcPresentation, H: PcPresentation) -> bool | str:
    """True/False, or "undecided" above the exhaustive search limit."""
    try:
        return find_isomorphism(G, H) is not None
    except Undecided:
        return "undecided"


def identify_subgroup(H: PcPresentation) -> str:
    """Catalog id of a group given by presentation, else a fingerprint string."""
    for e in _entries():
        if e.order != H.order:
            continue
        K = e.group()
        if K is not None and isomorphic(H, K) is True:
            return e.id
    return f"<order {H.order}, aqi {format_ati(aqi(H))}>"


def maximal_subgroup_multiset(G: PcPresentation) -> Counter:
    """Identified isomorphism types of the first-layer members."""
    return Counter(identify_subgroup(S.presentation()) for S in first_layer(G))


# ----------------------------------------------------------------------
# JSON


def export_json(entries: Iterable[CatalogEntry] | None = None, indent: int = 2) -> str:
    entries = builtin_entries() if entries is None else list(entries)
    return json.dumps({"entries": [e.to_dict() for e in entries]}, indent=indent)


def load_json(text: str) -> list[CatalogEntry]:
    out = []
    for d in json.loads(text)["entries"]:
        params = BlackburnParams.parse(d["params"]) if d.get("params") else None
        pres = d.get("presentation") if d["kind"] == "presentation" else None
        e = CatalogEntry(d["id"], d["kind"], d["metadata"], presentation_text=pres, params=params)
        if d.get("ap2") and e.presentation_text is None and e.params is None:
            e._ap2 = parse_pattern(d["ap2"])
        out.append(e)
    return out
