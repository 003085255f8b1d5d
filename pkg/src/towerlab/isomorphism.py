"""Isomorphism testing for small p-groups.

Invariants first (orders, centralizers and membership in characteristic
subgroups, element by element), then a search over generator images: the
source group is generated by a few elements, every pc generator is written
as a word in them, and a candidate assignment is accepted when the images
satisfy all pc relations and generate the target modulo its Frattini
subgroup.  The images of the last generator are tried in one vectorized pass.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .abelian import aqi
from .pcgroup import (
    Homomorphism,
    PcPresentation,
    Subgroup,
    center,
    derived_series,
    frattini_subgroup,
    lower_central_series,
    subgroup,
    two_step_centralizer,
)
from .tables import MAX_TABLE_ORDER, element_orders, inverse_table

EXHAUSTIVE_LIMIT = 3**7


class Undecided(Exception):
    """Raised when the groups agree on all invariants but are too large to search."""


@dataclass(eq=False)
class GroupData:
    G: PcPresentation

    @cached_property
    def T(self) -> np.ndarray:
        return self.G.table

    @cached_property
    def inv(self) -> np.ndarray:
        return inverse_table(self.T)

    @cached_property
    def orders(self) -> np.ndarray:
        return element_orders(self.T, self.G.p)

    @cached_property
    def frattini(self) -> Subgroup:
        return frattini_subgroup(self.G)

    @cached_property
    def characteristic(self) -> list[Subgroup]:
        G = self.G
        subs = lower_central_series(G)[1:-1] + derived_series(G)[1:-1]
        subs += [self.frattini, center(G), two_step_centralizer(G)]
        powers = {G.index(G.pow(g, G.p)) for g in G.elements()}
        subs.append(subgroup(G, [G.element_at(i) for i in powers]))
        return subs

    def members(self, S: Subgroup) -> np.ndarray:
        """Indices of the elements of S."""
        G, T = self.G, self.T
        arr = np.zeros(1, dtype=np.int64)
        for h in reversed(S.igs):
            hi = G.index(h)
            parts, cur = [], 0
            for _ in range(G.p):
                parts.append(T[cur, arr])
                cur = T[cur, hi]
            arr = np.concatenate(parts)
        return arr

    @cached_property
    def centralizer_sizes(self) -> np.ndarray:
        T = self.T
        return (T == T.T).sum(axis=1)

    @cached_property
    def signatures(self) -> np.ndarray:
        """Per element: order, order of its p-th power, centralizer size, memberships."""
        N = self.G.order
        cols = [self.orders, self.centralizer_sizes]
        for S in self.characteristic:
            mask = np.zeros(N, dtype=np.int64)
            mask[self.members(S)] = 1
            cols.append(mask)
        return np.stack(cols, axis=1)

    @cached_property
    def sig_ids(self) -> tuple[np.ndarray, dict]:
        keys = {}
        ids = np.empty(self.G.order, dtype=np.int64)
        for i, row in enumerate(map(tuple, self.signatures.tolist())):
            ids[i] = keys.setdefault(row, len(keys))
        return ids, keys

    def sig_of(self, i: int) -> tuple:
        return tuple(self.signatures[i].tolist())

    @cached_property
    def frattini_coords(self) -> np.ndarray:
        """Coordinates of every element in G/Phi(G) as a single base-p integer."""
        G, Phi = self.G, self.frattini
        free = [k for k in range(G.m) if k not in set(Phi.depths)]
        out = np.empty(G.order, dtype=np.int64)
        for i, g in enumerate(G.elements()):
            r = Phi.sift(g)
            v = 0
            for k in free:
                v = v * G.p + r[k]
            out[i] = v
        return out

    @cached_property
    def invariants(self) -> tuple:
        G = self.G
        sig_census = Counter(map(tuple, self.signatures.tolist()))
        return (
            G.order,
            str(aqi(G)),
            len(lower_central_series(G)),
            len(derived_series(G)),
            tuple(S.order for S in self.characteristic),
            tuple(sorted(sig_census.items())),
        )


def group_data(G: PcPresentation) -> GroupData:
    """Per-group cache, stored on the presentation so it lives as long as G."""
    d = G.__dict__.get("_group_data")
    if d is None:
        d = GroupData(G)
        G.__dict__["_group_data"] = d
    return d


def _span(coords: list[int], p: int, d: int) -> set[int]:
    vecs = [_digits(c, p, d) for c in coords]
    out = set()
    for comb in itertools.product(range(p), repeat=len(vecs)):
        v = [sum(c * vec[k] for c, vec in zip(comb, vecs)) % p for k in range(d)]
        out.add(_undigits(v, p))
    return out


def _digits(v: int, p: int, d: int) -> list[int]:
    out = [0] * d
    for k in range(d - 1, -1, -1):
        v, out[k] = divmod(v, p)
    return out


def _undigits(v, p: int) -> int:
    r = 0
    for e in v:
        r = r * p + e
    return r


def _choose_generators(dG: GroupData) -> list[int]:
    """Elements generating G modulo Phi, preferring rare signatures."""
    G = dG.G
    p = G.p
    d = G.m - len(dG.frattini.depths)
    ids, _ = dG.sig_ids
    counts = np.bincount(ids)
    rarity = counts[ids]
    coords = dG.frattini_coords
    chosen: list[int] = []
    for _ in range(d):
        span = _span([int(coords[c]) for c in chosen], p, d)
        ok = ~np.isin(coords, list(span))
        cand = np.nonzero(ok)[0]
        best = cand[np.lexsort((cand, rarity[cand]))[0]]
        chosen.append(int(best))
    return chosen


def _words(dG: GroupData, gens: list[int]) -> dict[int, list[int]]:
    """BFS words (in ``gens``, right multiplication) for all elements."""
    T = dG.T
    parent = {0: None}
    queue = deque([0])
    while queue:
        e = queue.popleft()
        for k, g in enumerate(gens):
            f = int(T[e, g])
            if f not in parent:
                parent[f] = (e, k)
                queue.append(f)
    return parent


def find_isomorphism(G: PcPresentation, H: PcPresentation, limit: int = EXHAUSTIVE_LIMIT) -> Homomorphism | None:
    """An isomorphism G -> H, None if there is none.

    Raises :class:`Undecided` when all invariants agree but the order is above
    ``limit``.
    """
    if G.order != H.order or G.p != H.p:
        return None
    if G.m == 0:
        return Homomorphism(G, H, [])
    if G.order > limit:
        if _cheap_invariants(G) != _cheap_invariants(H):
            return None
        if G.order <= MAX_TABLE_ORDER and group_data(G).invariants != group_data(H).invariants:
            return None
        raise Undecided(f"order {G.order} is above the exhaustive limit {limit}")
    dG, dH = group_data(G), group_data(H)
    if dG.invariants != dH.invariants:
        return None
    p = G.p
    gens = _choose_generators(dG)
    d = len(gens)
    parent = _words(dG, gens)
    if len(parent) != G.order:
        raise RuntimeError("chosen elements do not generate the group")

    TH, invH = dH.T, dH.inv
    coordsH = dH.frattini_coords
    # candidate images by signature
    cands = []
    for g in gens:
        sig = dG.sig_of(g)
        mask = np.all(dH.signatures == np.array(sig), axis=1)
        cands.append(np.nonzero(mask)[0])
    gidx = [G.index(G.gen(k)) for k in range(G.m)]
    rules = list(G.rules())
    xy_order = int(dG.orders[dG.T[gens[0], gens[-1]]]) if d > 1 else None

    def image_fn(assign: list):
        memo: dict[int, object] = {0: 0}

        def img(e: int):
            if e in memo:
                return memo[e]
            chain = []
            cur = e
            while cur not in memo:
                par, k = parent[cur]
                chain.append((cur, par, k))
                cur = par
            for node, par, k in reversed(chain):
                memo[node] = TH[memo[par], assign[k]]
            return memo[e]

        return img

    def power(v, n):
        r = np.zeros_like(v) if isinstance(v, np.ndarray) else 0
        for _ in range(n):
            r = TH[r, v]
        return r

    for prefix in itertools.product(*cands[:-1]):
        prefix = [int(a) for a in prefix]
        span = _span([int(coordsH[a]) for a in prefix], p, d)
        if len(span) != p ** len(prefix):
            continue
        last = cands[-1]
        last = last[~np.isin(coordsH[last], list(span))]
        if xy_order is not None and len(last):
            last = last[dH.orders[TH[prefix[0], last]] == xy_order]
        if not len(last):
            continue
        img = image_fn(prefix + [last])
        images = [img(i) for i in gidx]
        images = [np.broadcast_to(np.asarray(v), last.shape) for v in images]
        ok = np.ones(len(last), dtype=bool)
        for kind, idx, rhs in rules:
            if kind == "pow":
                (i,) = idx
                lhs = power(images[i], p)
            else:
                j, i = idx
                lhs = TH[TH[invH[images[j]], invH[images[i]]], TH[images[j], images[i]]]
            r = np.zeros(len(last), dtype=np.int64)
            for k, e in enumerate(rhs):
                for _ in range(e):
                    r = TH[r, images[k]]
            ok &= lhs == r
            if not ok.any():
                break
        if ok.any():
            c = int(np.nonzero(ok)[0][0])
            ims = [H.element_at(int(v[c])) for v in images]
            return Homomorphism(G, H, ims)
    return None


def _cheap_invariants(G: PcPresentation) -> tuple:
    return (G.order, str(aqi(G)), len(lower_central_series(G)), len(derived_series(G)))


def are_isomorphic(G: PcPresentation, H: PcPresentation, limit: int = EXHAUSTIVE_LIMIT) -> bool:
    return find_isomorphism(G, H, limit) is not None


def isomorphism_status(G: PcPresentation, H: PcPresentation, limit: int = EXHAUSTIVE_LIMIT) -> str:
    """"isomorphic", "not isomorphic" or "undecided"."""
    try:
        return "isomorphic" if are_isomorphic(G, H, limit) else "not isomorphic"
    except Undecided:
        return "undecided"
