"""Finite p-groups given by consistent polycyclic power-commutator presentations.

Elements are exponent vectors ``(e_1, ..., e_m)`` with ``0 <= e_i < p``, read as
the collected word ``g_1^e_1 ... g_m^e_m``.  The pc series is required to be
central: the right-hand side of ``g_i^p`` only involves generators after
``g_i`` and the right-hand side of ``[g_j, g_i]`` (``j > i``) only involves
generators after ``g_j``.  Commutators use the convention
``[a, b] = a^-1 b^-1 a b``.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

Element = tuple[int, ...]
# A word is a string in label syntax ("x^2 s2^-1"), or a sequence of
# (generator, exponent) pairs where generator is a label or 0-based index.
WordLike = Union[str, Sequence[tuple[Union[int, str], int]]]

_TOKEN = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


class PresentationError(ValueError):
    """Raised for malformed, non-triangular or inconsistent presentations."""


class PcPresentation:
    """A consistent pc presentation of a finite p-group of order p^m.

    ``powers`` maps a generator to the word equal to ``g_i^p`` and
    ``commutators`` maps a pair ``(g_j, g_i)`` with ``j > i`` to the word equal
    to ``[g_j, g_i]``.  Missing rules are trivial.  Right-hand sides may be
    arbitrary words in the later generators (including inverses); they are
    collected into normal form bottom-up during construction.
    """

    def __init__(
        self,
        labels: Sequence[str],
        powers: Mapping[Union[int, str], WordLike] | None = None,
        commutators: Mapping[tuple[Union[int, str], Union[int, str]], WordLike] | None = None,
        p: int = 3,
        check: bool = True,
    ):
        self.p = p
        self.labels = tuple(labels)
        self.m = len(self.labels)
        if len(set(self.labels)) != self.m:
            raise PresentationError("duplicate generator labels")
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        m = self.m
        self.identity: Element = (0,) * m

        raw_pow: dict[int, list[tuple[int, int]]] = {}
        for g, w in (powers or {}).items():
            i = self._gen_index(g)
            letters = self._parse_word(w)
            if any(k <= i for k, _ in letters):
                raise PresentationError(
                    f"power rule of {self.labels[i]} uses a generator not after it"
                )
            raw_pow[i] = letters
        raw_comm: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for (gj, gi), w in (commutators or {}).items():
            j, i = self._gen_index(gj), self._gen_index(gi)
            letters = self._parse_word(w)
            if j < i:
                # [g_i, g_j] = w  <=>  [g_j, g_i] = w^-1
                j, i = i, j
                letters = [(k, -e) for k, e in reversed(letters)]
            if j == i:
                raise PresentationError("commutator rule of a generator with itself")
            if any(k <= j for k, _ in letters):
                raise PresentationError(
                    f"commutator rule [{self.labels[j]},{self.labels[i]}] is not triangular"
                )
            raw_comm[(j, i)] = letters

        self._pow: list[Element] = [self.identity] * m
        self._comm: dict[tuple[int, int], Element] = {}
        self._inv_gen: list[Element] = [self.identity] * m
        # g_j^{g_i} = g_j [g_j, g_i], stored under (i, j)
        self._conj_gen: dict[tuple[int, int], Element] = {}
        # bottom-up normalisation: rules of N_{i+1} are final before level i
        for i in range(m - 1, -1, -1):
            for j in range(m - 1, i, -1):
                c = self._collect_letters(raw_comm.get((j, i), []))
                self._comm[(j, i)] = c
                if any(c):
                    v = list(c)
                    v[j] = 1
                    self._conj_gen[(i, j)] = tuple(v)
            self._pow[i] = self._collect_letters(raw_pow.get(i, []))
            inv_w = self._collect_letters(
                [(k, -1) for k in reversed(range(m)) for _ in range(self._pow[i][k])]
            )
            self._inv_gen[i] = self._collect_letters(
                [(i, 1)] * (p - 1) + _vector_letters(inv_w)
            )
        self._conj_cache: dict[tuple[int, int, Element], Element] = {}
        self._cpow_cache: dict[tuple[int, int, int], Element] = {}
        if check:
            self.check_consistency()

    # ------------------------------------------------------------------
    # construction helpers

    def _gen_index(self, g: Union[int, str]) -> int:
        if isinstance(g, str):
            if g not in self._index:
                raise PresentationError(f"unknown generator {g!r}")
            return self._index[g]
        if not 0 <= g < self.m:
            raise PresentationError(f"generator index {g} out of range")
        return g

    def _parse_word(self, w: WordLike) -> list[tuple[int, int]]:
        if isinstance(w, str):
            return [(self._gen_index(lab), e) for lab, e in parse_word_tokens(w)]
        return [(self._gen_index(g), int(e)) for g, e in w]

    # ------------------------------------------------------------------
    # collection

    def _collect_letters(self, letters: Iterable[tuple[int, int]], start: Element | None = None) -> Element:
        """Collection from the left with an explicit stack of letters."""
        p, m = self.p, self.m
        vec = list(start) if start is not None else [0] * m
        stack: list[int] = []
        for g, e in reversed(list(letters)):
            if e >= 0:
                stack.extend([g] * e)
            else:
                inv = _vector_letters(self._inv_gen[g])
                for _ in range(-e):
                    stack.extend(k for k, _ in reversed(inv))
        while stack:
            i = stack.pop()
            tail = [(k, vec[k]) for k in range(i + 1, m) if vec[k] and (i, k) in self._conj_gen]
            if not tail and vec[i] + 1 < p:
                vec[i] += 1
                continue
            # move g_i past the non-commuting tail: pull it off, re-push it conjugated
            tail = [(k, vec[k]) for k in range(i + 1, m) if vec[k]]
            for k, _ in tail:
                vec[k] = 0
            vec[i] += 1
            pending: list[int] = []
            if vec[i] == p:
                vec[i] = 0
                pending.extend(k for k, _ in _vector_letters(self._pow[i]))
            for k, e in tail:
                conj = self._conj_gen.get((i, k))
                word = [k] if conj is None else [q for q, _ in _vector_letters(conj)]
                pending.extend(word * e)
            stack.extend(reversed(pending))
        return tuple(vec)

    def collect(self, word: Union[str, Sequence[int]]) -> Element:
        """Normal form of a word.

        ``word`` is either label syntax (``"x y^2 s2^-1"``) or a sequence of
        signed 1-based generator indices, ``-i`` standing for ``g_i^-1``.
        """
        if isinstance(word, str):
            return self._collect_letters(self._parse_word(word))
        letters = []
        for s in word:
            if s == 0 or abs(s) > self.m:
                raise PresentationError(f"invalid generator index {s}")
            letters.append((abs(s) - 1, 1 if s > 0 else -1))
        return self._collect_letters(letters)

    # ------------------------------------------------------------------
    # arithmetic (recursive: conjugation by g_i acts on N_{i+1})

    def _cpow(self, i: int, k: int, f: int) -> Element:
        key = (i, k, f)
        r = self._cpow_cache.get(key)
        if r is None:
            base = self._conj_gen.get((i, k))
            if base is None:
                v = [0] * self.m
                v[k] = f
                r = tuple(v)
            else:
                r = self.identity
                for _ in range(f):
                    r = self.mul(r, base)
            self._cpow_cache[key] = r
        return r

    def _conj(self, i: int, e: int, t: Element) -> Element:
        """t^(g_i^e) for t in N_{i+1}."""
        key = (i, e, t)
        r = self._conj_cache.get(key)
        if r is None:
            if e > 1:
                r = self._conj(i, 1, self._conj(i, e - 1, t))
            else:
                r = self.identity
                for k in range(i + 1, self.m):
                    if t[k]:
                        r = self.mul(r, self._cpow(i, k, t[k]))
            self._conj_cache[key] = r
        return r

    def _rmul_gen(self, a: list[int], i: int, e: int) -> list[int]:
        p = self.p
        r = a[i] + e
        if not any(a[i + 1:]):
            if r < p:
                a[i] = r
                return a
            rest = self._pow[i]
        else:
            tail = (0,) * (i + 1) + tuple(a[i + 1:])
            rest = self._conj(i, e, tail)
            if r >= p:
                rest = self.mul(self._pow[i], rest)
        a[i] = r % p
        a[i + 1:] = rest[i + 1:]
        return a

    def mul(self, a: Element, b: Element) -> Element:
        res = list(a)
        for i, e in enumerate(b):
            if e:
                res = self._rmul_gen(res, i, e)
        return tuple(res)

    def prod(self, elements: Iterable[Element]) -> Element:
        r = self.identity
        for g in elements:
            r = self.mul(r, g)
        return r

    def inv(self, a: Element) -> Element:
        r = self.identity
        for k in range(self.m - 1, -1, -1):
            for _ in range(a[k]):
                r = self.mul(r, self._inv_gen[k])
        return r

    def pow(self, a: Element, n: int) -> Element:
        if n < 0:
            a, n = self.inv(a), -n
        r, base = self.identity, a
        while n:
            if n & 1:
                r = self.mul(r, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return r

    def comm(self, a: Element, b: Element) -> Element:
        """[a, b] = a^-1 b^-1 a b."""
        return self.mul(self.inv(self.mul(b, a)), self.mul(a, b))

    def conj(self, a: Element, b: Element) -> Element:
        """a^b = b^-1 a b."""
        return self.mul(self.inv(b), self.mul(a, b))

    def element_order(self, a: Element) -> int:
        n = 1
        while a != self.identity:
            a = self.pow(a, self.p)
            n *= self.p
        return n

    def gen(self, g: Union[int, str]) -> Element:
        v = [0] * self.m
        v[self._gen_index(g)] = 1
        return tuple(v)

    def gens(self) -> list[Element]:
        return [self.gen(i) for i in range(self.m)]

    def word(self, text: str) -> Element:
        return self._collect_letters(self._parse_word(text))

    def format_element(self, a: Element) -> str:
        parts = []
        for lab, e in zip(self.labels, a):
            if e == 1:
                parts.append(lab)
            elif e:
                parts.append(f"{lab}^{e}")
        return " ".join(parts) if parts else "1"

    # ------------------------------------------------------------------
    # rules

    def power_rule(self, i: int) -> Element:
        return self._pow[i]

    def commutator_rule(self, j: int, i: int) -> Element:
        if j <= i:
            raise ValueError("commutator rules are stored for j > i")
        return self._comm[(j, i)]

    def rules(self) -> Iterator[tuple[str, tuple[int, ...], Element]]:
        """Yield ('pow', (i,), rhs) and ('comm', (j, i), rhs) for all rules."""
        for i in range(self.m):
            yield "pow", (i,), self._pow[i]
            for j in range(i + 1, self.m):
                yield "comm", (j, i), self._comm[(j, i)]

    @property
    def order(self) -> int:
        return self.p ** self.m

    @property
    def relative_orders(self) -> tuple[int, ...]:
        return (self.p,) * self.m

    def elements(self) -> Iterator[Element]:
        """All elements in lexicographic (big-endian index) order."""
        return itertools.product(range(self.p), repeat=self.m)

    def index(self, a: Element) -> int:
        r = 0
        for e in a:
            r = r * self.p + e
        return r

    def element_at(self, idx: int) -> Element:
        v = [0] * self.m
        for k in range(self.m - 1, -1, -1):
            idx, v[k] = divmod(idx, self.p)
        return tuple(v)

    def is_abelian(self) -> bool:
        return not any(any(c) for c in self._comm.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PcPresentation):
            return NotImplemented
        return (
            self.p == other.p
            and self.labels == other.labels
            and self._pow == other._pow
            and self._comm == other._comm
        )

    def __hash__(self) -> int:
        return hash((self.p, self.labels, tuple(self._pow), tuple(sorted(self._comm.items()))))

    def __repr__(self) -> str:
        return f"PcPresentation(order={self.p}^{self.m}, gens={' '.join(self.labels)})"

    # ------------------------------------------------------------------
    # consistency

    def check_consistency(self, exhaustive_limit: int = 3**6) -> None:
        """Raise PresentationError unless the presentation is consistent.

        Level by level, ``N_i = <g_i, N_{i+1}>`` is a cyclic extension of the
        already verified ``N_{i+1}``; it exists with order ``p |N_{i+1}|``
        exactly when conjugation by ``g_i`` is an endomorphism of ``N_{i+1}``
        fixing ``w = g_i^p`` whose p-th power is conjugation by ``w``.  Small
        groups additionally get an exhaustive associativity check.
        """
        p, m = self.p, self.m
        for i in range(m - 1, -1, -1):
            w = self._pow[i]

            def phi(t: Element, i: int = i) -> Element:
                return self._conj(i, 1, (0,) * (i + 1) + tuple(t[i + 1:]))

            for k in range(i + 1, m):
                gk = self.gen(k)
                if self.pow(phi(gk), p) != phi(self._pow[k]):
                    raise PresentationError(
                        f"inconsistent: power relation of {self.labels[k]} under conjugation by {self.labels[i]}"
                    )
                for l in range(k + 1, m):
                    if self.comm(phi(self.gen(l)), phi(gk)) != phi(self._comm[(l, k)]):
                        raise PresentationError(
                            f"inconsistent: [{self.labels[l]},{self.labels[k]}] under conjugation by {self.labels[i]}"
                        )
                t = gk
                for _ in range(p):
                    t = phi(t)
                if t != self.conj(gk, w):
                    raise PresentationError(
                        f"inconsistent: {self.labels[i]}^{p} does not act as its power word on {self.labels[k]}"
                    )
            if phi(w) != w:
                raise PresentationError(
                    f"inconsistent: {self.labels[i]} does not commute with its power word"
                )
        if 1 < self.order <= exhaustive_limit:
            import numpy as np

            T = self.table
            idx = np.arange(self.order)
            gidx = [self.index(g) for g in self.gens()]
            for g in gidx:
                ag = T[idx, g]
                for h in gidx:
                    if not np.array_equal(T[ag, h], T[idx, T[g, h]]):
                        raise PresentationError("inconsistent: multiplication is not associative")

    # ------------------------------------------------------------------

    @cached_property
    def table(self):
        """Full multiplication table as a numpy array (see :mod:`towerlab.tables`)."""
        from .tables import multiplication_table

        return multiplication_table(self)


def _vector_letters(v: Element) -> list[tuple[int, int]]:
    return [(k, 1) for k, e in enumerate(v) for _ in range(e)]


def parse_word_tokens(text: str) -> list[tuple[str, int]]:
    """Split ``"x y^2 s2^-1"`` (``*`` also separates) into (label, exponent) pairs."""
    out = []
    for tok in text.replace("*", " ").split():
        if tok == "1":
            continue
        mt = _TOKEN.match(tok)
        if not mt:
            raise PresentationError(f"bad word token {tok!r}")
        out.append((mt.group(1), int(mt.group(2)) if mt.group(2) else 1))
    return out


# ----------------------------------------------------------------------
# subgroups


@dataclass(frozen=True, eq=False)
class Subgroup:
    """Subgroup given by its canonical induced generating sequence.

    Every ``igs`` entry has leading exponent 1 and exponent 0 at the leading
    positions of all other entries, so equal subgroups have equal ``igs``.
    """

    group: PcPresentation
    igs: tuple[Element, ...]
    depths: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "depths", tuple(_depth(g) for g in self.igs))

    @property
    def order(self) -> int:
        return self.group.p ** len(self.igs)

    @property
    def log_order(self) -> int:
        return len(self.igs)

    @property
    def index(self) -> int:
        return self.group.p ** (self.group.m - len(self.igs))

    def __len__(self) -> int:
        return self.order

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.group is other.group and self.igs == other.igs

    def __hash__(self) -> int:
        return hash((id(self.group), self.igs))

    def __contains__(self, g: Element) -> bool:
        return self.sift(g) == self.group.identity

    def __le__(self, other: Subgroup) -> bool:
        return all(h in other for h in self.igs)

    def __lt__(self, other: Subgroup) -> bool:
        return self <= other and len(self.igs) < len(other.igs)

    def sift(self, g: Element) -> Element:
        """Right-reduce g to the canonical representative of the coset g*S."""
        G = self.group
        for h, d in zip(self.igs, self.depths):
            if g[d]:
                g = G.mul(g, G.pow(h, -g[d]))
        return g

    def coset_rep(self, g: Element) -> Element:
        """Canonical representative of the right coset S*g (zeros at S-depths)."""
        G = self.group
        for h, d in zip(self.igs, self.depths):
            if g[d]:
                g = G.mul(G.pow(h, -g[d]), g)
        return g

    def coordinates(self, g: Element) -> tuple[int, ...]:
        """Exponents (e_1..e_k) with g = h_1^e_1 ... h_k^e_k; g must lie in S."""
        G = self.group
        coords = []
        for h, d in zip(self.igs, self.depths):
            e = g[d]
            coords.append(e)
            if e:
                g = G.mul(G.pow(h, -e), g)
        if g != G.identity:
            raise ValueError("element is not in the subgroup")
        return tuple(coords)

    def element(self, coords: Sequence[int]) -> Element:
        G = self.group
        return G.prod(G.pow(h, e) for h, e in zip(self.igs, coords) if e)

    def elements(self) -> Iterator[Element]:
        for coords in itertools.product(range(self.group.p), repeat=len(self.igs)):
            yield self.element(coords)

    def transversal(self) -> Iterator[Element]:
        """Canonical right-coset representatives: vectors vanishing at S-depths."""
        G = self.group
        free = [k for k in range(G.m) if k not in set(self.depths)]
        for exps in itertools.product(range(G.p), repeat=len(free)):
            v = [0] * G.m
            for k, e in zip(free, exps):
                v[k] = e
            yield tuple(v)

    def is_normal(self) -> bool:
        G = self.group
        return all(G.conj(h, g) in self for h in self.igs for g in G.gens())

    @cached_property
    def _presentation(self) -> tuple[PcPresentation, Homomorphism]:
        G = self.group
        k = len(self.igs)
        labels = []
        for n, h in enumerate(self.igs):
            d = _depth(h)
            pure = sum(h) == 1
            lab = G.labels[d] if pure else f"h{n + 1}"
            if lab in labels:
                lab = f"h{n + 1}"
            labels.append(lab)
        powers = {}
        comms = {}
        for i, h in enumerate(self.igs):
            powers[i] = [(q, e) for q, e in enumerate(self.coordinates(G.pow(h, G.p))) if e]
            for j in range(i + 1, k):
                c = self.coordinates(G.comm(self.igs[j], h))
                comms[(j, i)] = [(q, e) for q, e in enumerate(c) if e]
        P = PcPresentation(labels, powers, comms, p=G.p, check=False)
        emb = Homomorphism(P, G, self.igs, check=False)
        return P, emb

    def presentation(self) -> PcPresentation:
        """Induced pc presentation on the igs, as a standalone group."""
        return self._presentation[0]

    def embedding(self) -> Homomorphism:
        return self._presentation[1]

    def __repr__(self) -> str:
        G = self.group
        gens = ", ".join(G.format_element(h) for h in self.igs)
        return f"Subgroup(order={self.order}, igs=<{gens}>)"


def _depth(g: Element) -> int:
    for k, e in enumerate(g):
        if e:
            return k
    return len(g)


def _canonical(G: PcPresentation, table: dict[int, Element]) -> tuple[Element, ...]:
    depths = sorted(table)
    igs = [table[d] for d in depths]
    for a in range(len(igs) - 1, -1, -1):
        h = igs[a]
        for b in range(a + 1, len(igs)):
            e = h[depths[b]]
            if e:
                h = G.mul(h, G.pow(igs[b], -e))
        igs[a] = h
    return tuple(igs)


def subgroup(G: PcPresentation, gens: Iterable[Element]) -> Subgroup:
    """Smallest subgroup containing ``gens`` (non-commutative Gauss sifting)."""
    p = G.p
    table: dict[int, Element] = {}
    queue = [g for g in gens]
    while queue:
        g = queue.pop()
        while True:
            d = _depth(g)
            if d == G.m:
                break
            h = table.get(d)
            if h is None:
                g = G.pow(g, pow(g[d], -1, p))
                queue.append(G.pow(g, p))
                for other in table.values():
                    queue.append(G.comm(g, other))
                table[d] = g
                break
            g = G.mul(g, G.pow(h, -g[d]))
    return Subgroup(G, _canonical(G, table))


def whole_group(G: PcPresentation) -> Subgroup:
    return Subgroup(G, tuple(G.gens()))


def trivial_subgroup(G: PcPresentation) -> Subgroup:
    return Subgroup(G, ())


def normal_closure(G: PcPresentation, S: Union[Subgroup, Iterable[Element]], under: Iterable[Element] | None = None) -> Subgroup:
    """Closure of S under conjugation by ``under`` (default: generators of G)."""
    if not isinstance(S, Subgroup):
        S = subgroup(G, S)
    conj_by = list(under) if under is not None else G.gens()
    while True:
        extra = [G.comm(h, g) for h in S.igs for g in conj_by]
        extra = [c for c in extra if c not in S]
        if not extra:
            return S
        S = subgroup(G, list(S.igs) + extra)


def commutator_subgroup(G: PcPresentation, A: Subgroup, B: Subgroup) -> Subgroup:
    """[A, B], normal closure in <A, B> of the generator commutators."""
    gens = [G.comm(a, b) for a in A.igs for b in B.igs]
    return normal_closure(G, subgroup(G, gens), under=list(A.igs) + list(B.igs))


def derived_subgroup(G: PcPresentation, S: Subgroup | None = None) -> Subgroup:
    S = whole_group(G) if S is None else S
    return commutator_subgroup(G, S, S)


def lower_central_series(G: PcPresentation) -> list[Subgroup]:
    """gamma_1 = G > gamma_2 > ... > gamma_{c+1} = 1."""
    series = [whole_group(G)]
    while series[-1].order > 1:
        series.append(commutator_subgroup(G, series[-1], series[0]))
        if series[-1] == series[-2]:
            raise PresentationError("lower central series does not terminate")
    return series


def nilpotency_class(G: PcPresentation) -> int:
    return len(lower_central_series(G)) - 1


def logarithmic_order(G: PcPresentation) -> int:
    return G.m


def coclass(G: PcPresentation) -> int:
    return G.m - nilpotency_class(G)


def derived_series(G: PcPresentation) -> list[Subgroup]:
    series = [whole_group(G)]
    while series[-1].order > 1:
        series.append(derived_subgroup(G, series[-1]))
    return series


def derived_length(G: PcPresentation) -> int:
    return len(derived_series(G)) - 1


def frattini_subgroup(G: PcPresentation) -> Subgroup:
    """Phi(G) = G' G^p."""
    D = derived_subgroup(G)
    return subgroup(G, list(D.igs) + [G.pow(g, G.p) for g in G.gens()])


def center(G: PcPresentation) -> Subgroup:
    gens = G.gens()
    return subgroup(G, [z for z in G.elements() if all(G.mul(z, g) == G.mul(g, z) for g in gens)])


def two_step_centralizer(G: PcPresentation) -> Subgroup:
    """chi_2(G) = {g : [g, gamma_2] <= gamma_4}."""
    lcs = lower_central_series(G)
    g2 = lcs[1] if len(lcs) > 1 else trivial_subgroup(G)
    g4 = lcs[3] if len(lcs) > 3 else trivial_subgroup(G)
    keep = [t for t in g2.transversal() if all(G.comm(t, h) in g4 for h in g2.igs)]
    return subgroup(G, keep + list(g2.igs))


def maximal_subgroups_containing(G: PcPresentation, N: Subgroup) -> list[Subgroup]:
    """Index-p subgroups above N, which must contain Phi(G)."""
    p = G.p
    Phi = frattini_subgroup(G)
    base = subgroup(G, list(N.igs) + list(Phi.igs))
    free = [k for k in range(G.m) if k not in set(base.depths)]
    d = len(free)
    out = []
    # hyperplanes of F_p^d: kernels of normalised nonzero functionals
    for func in itertools.product(range(p), repeat=d):
        nz = [c for c in func if c]
        if not nz or nz[0] != 1:
            continue
        basis = []
        for vec in itertools.product(range(p), repeat=d):
            if sum(a * b for a, b in zip(func, vec)) % p == 0 and any(vec):
                basis.append(vec)
        gens = []
        for vec in basis:
            v = [0] * G.m
            for k, e in zip(free, vec):
                v[k] = e
            gens.append(tuple(v))
        out.append(subgroup(G, list(base.igs) + gens))
    return out


def first_layer(G: PcPresentation, ordering: str = "auto") -> list[Subgroup]:
    """Maximal subgroups containing G' (all of them contain Phi(G)).

    ``ordering="auto"`` uses H1 = <y,G'>, H2 = <x,G'>, H3 = <xy,G'>,
    H4 = <xy^2,G'> for two-generated groups, where y is chosen in the
    two-step centralizer when that is a maximal subgroup and the group has
    class at least 3, and (x, y) are the first two pc generators otherwise.
    Every other case, and ``ordering="lex"``, sorts by the canonical igs.
    """
    D = derived_subgroup(G)
    layer = maximal_subgroups_containing(G, D)
    if ordering == "lex" or len(layer) != G.p + 1:
        return sorted(layer, key=lambda S: S.igs)
    basis = generator_pair(G)
    if basis is None:
        return sorted(layer, key=lambda S: S.igs)
    x, y = basis
    Phi = frattini_subgroup(G)
    ordered = [subgroup(G, [y] + list(Phi.igs))]
    for k in range(G.p):
        ordered.append(subgroup(G, [G.mul(x, G.pow(y, k))] + list(Phi.igs)))
    return ordered


def generator_pair(G: PcPresentation) -> tuple[Element, Element] | None:
    """Generators (x, y) used for the standard ordering of the first layer."""
    if G.m < 2:
        return None
    Phi = frattini_subgroup(G)
    if Phi.index != G.p**2 or set(Phi.depths) & {0, 1}:
        return None
    x, y = G.gen(0), G.gen(1)
    if nilpotency_class(G) >= 3:
        chi = two_step_centralizer(G)
        if chi.index == G.p:
            inside = [g for g in [y, x] + [G.mul(x, G.pow(y, k)) for k in range(1, G.p)] if g in chi]
            y = inside[0]
            x = G.gen(0) if y != G.gen(0) else G.gen(1)
    return x, y


# ----------------------------------------------------------------------
# homomorphisms and quotients


class Homomorphism:
    """Homomorphism given by the images of the source pc generators."""

    def __init__(self, source: PcPresentation, target: PcPresentation, images: Sequence[Element], check: bool = True):
        if len(images) != source.m:
            raise ValueError("need one image per source generator")
        self.source = source
        self.target = target
        self.images = tuple(tuple(v) for v in images)
        if check:
            self._check()

    def _check(self) -> None:
        S, T = self.source, self.target
        for kind, idx, rhs in S.rules():
            if kind == "pow":
                (i,) = idx
                ok = T.pow(self.images[i], S.p) == self(rhs)
            else:
                j, i = idx
                ok = T.comm(self.images[j], self.images[i]) == self(rhs)
            if not ok:
                raise PresentationError(f"images violate relation {kind} {idx}")

    def __call__(self, g: Element) -> Element:
        T = self.target
        r = T.identity
        for img, e in zip(self.images, g):
            if e:
                r = T.mul(r, T.pow(img, e))
        return r

    def kernel(self) -> Subgroup:
        S = self.source
        return subgroup(S, [g for g in S.elements() if self(g) == self.target.identity])

    def image(self) -> Subgroup:
        return subgroup(self.target, self.images)

    def compose(self, other: Homomorphism) -> Homomorphism:
        """self after other."""
        return Homomorphism(other.source, self.target, [self(g) for g in other.images], check=False)


def quotient(G: PcPresentation, N: Subgroup) -> tuple[PcPresentation, Homomorphism]:
    """Presentation of G/N on the generators outside N's depths, with projection."""
    if not N.is_normal():
        raise PresentationError("quotient by a subgroup that is not normal")
    free = [k for k in range(G.m) if k not in set(N.depths)]
    pos = {k: n for n, k in enumerate(free)}

    def project(g: Element) -> list[tuple[int, int]]:
        r = N.sift(g)
        return [(pos[k], e) for k, e in enumerate(r) if e]

    powers = {}
    comms = {}
    for a, k in enumerate(free):
        gk = G.gen(k)
        powers[a] = project(G.pow(gk, G.p))
        for b in range(a + 1, len(free)):
            comms[(b, a)] = project(G.comm(G.gen(free[b]), gk))
    Q = PcPresentation([G.labels[k] for k in free], powers, comms, p=G.p, check=False)
    images = []
    for k in range(G.m):
        v = [0] * len(free)
        for q, e in project(G.gen(k)):
            v[q] = e
        images.append(tuple(v))
    return Q, Homomorphism(G, Q, images, check=False)


def abelianization(G: PcPresentation) -> tuple[PcPresentation, Homomorphism]:
    return quotient(G, derived_subgroup(G))
