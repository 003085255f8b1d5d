"""Smith normal form, abelian type invariants and abelianizations."""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .pcgroup import PcPresentation, derived_subgroup


@dataclass(frozen=True)
class AbelianTypeInvariants:
    """Finite abelian p-group as (exponent, multiplicity) pairs.

    ``pairs = ((2, 1), (1, 1))`` is C9 x C3, written "21" logarithmically.
    Exponents are strictly decreasing; the empty tuple is the trivial group.
    """

    pairs: tuple[tuple[int, int], ...] = ()
    p: int = 3

    def __post_init__(self):
        exps = [e for e, _ in self.pairs]
        if any(e < 1 for e in exps) or any(r < 1 for _, r in self.pairs):
            raise ValueError("exponents and multiplicities must be positive")
        if any(a <= b for a, b in zip(exps, exps[1:])):
            raise ValueError("exponents must be strictly decreasing")

    @classmethod
    def from_exponents(cls, exponents: Iterable[int], p: int = 3) -> AbelianTypeInvariants:
        """From a multiset of cyclic-factor exponents (zeros are dropped)."""
        c = Counter(e for e in exponents if e > 0)
        return cls(tuple(sorted(c.items(), reverse=True)), p)

    @classmethod
    def from_orders(cls, orders: Iterable[int], p: int = 3) -> AbelianTypeInvariants:
        """From cyclic orders (e.g. SNF divisors), keeping only the p-part."""
        return cls.from_exponents((valuation(d, p) for d in orders if d != 1), p)

    @property
    def exponents(self) -> list[int]:
        """Cyclic-factor exponents in decreasing order, with repetition."""
        return [e for e, r in self.pairs for _ in range(r)]

    @property
    def rank(self) -> int:
        return sum(r for _, r in self.pairs)

    @property
    def log_order(self) -> int:
        return sum(e * r for e, r in self.pairs)

    @property
    def order(self) -> int:
        return self.p ** self.log_order

    @property
    def cyclic_orders(self) -> list[int]:
        return [self.p**e for e in self.exponents]

    def __str__(self) -> str:
        return format_ati(self)


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n, v = abs(n), 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def format_ati(a: AbelianTypeInvariants) -> str:
    if not a.pairs:
        return "()"
    parts = []
    for e, r in a.pairs:
        if e > 9:
            raise ValueError("logarithmic form only covers exponents up to 9")
        parts.append(str(e) if r == 1 else f"{e}^{r}" if r < 10 else f"{e}^{{{r}}}")
    return "".join(parts)


class ATIParseError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at position {pos} in {text!r}")
        self.pos = pos


# multiplicities above 9 are braced ("1^{12}") so that "2^21" reads as 2^2 1
_COMPONENT = re.compile(r"([1-9])(?:\^(?:([1-9])|\{([1-9][0-9]*)\}))?")


def parse_ati(text: str, p: int = 3) -> AbelianTypeInvariants:
    """Inverse of :func:`format_ati`; also accepts "1" for C_p and "()"."""
    s = text.strip()
    if s in ("()", ""):
        return AbelianTypeInvariants((), p)
    offset = len(text) - len(text.lstrip())
    pos, pairs = 0, []
    while pos < len(s):
        m = _COMPONENT.match(s, pos)
        if not m:
            raise ATIParseError(text, pos + offset, f"unexpected {s[pos]!r}")
        e, r = int(m.group(1)), int(m.group(2) or m.group(3) or 1)
        if pairs and e >= pairs[-1][0]:
            raise ATIParseError(text, pos + offset, "exponents must strictly decrease")
        pairs.append((e, r))
        pos = m.end()
    return AbelianTypeInvariants(tuple(pairs), p)


def format_ati_tuple(items: Sequence[AbelianTypeInvariants]) -> str:
    return "(" + ",".join(format_ati(a) for a in items) + ")"


def parse_ati_tuple(text: str, p: int = 3) -> list[AbelianTypeInvariants]:
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ATIParseError(text, 0, "tuple must be parenthesised")
    inner = s[1:-1]
    if not inner:
        return []
    return [parse_ati(part, p) for part in inner.split(",")]


# ----------------------------------------------------------------------
# Smith normal form


def smith_normal_form(M: Sequence[Sequence[int]]) -> list[int]:
    """Invariant factors d_1 | d_2 | ... of the integer matrix ``M``.

    Returns the ``min(rows, cols)`` diagonal entries of the normal form.  The
    cokernel Z^cols / rowspace(M) is the sum of the Z/d_i (Z for d_i = 0)
    and a free part of rank ``cols - min(rows, cols)``.
    """
    A = [[int(x) for x in row] for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    n = min(rows, cols)
    for t in range(n):
        while True:
            piv = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                break
            i, j = piv
            A[t], A[i] = A[i], A[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
            pv = A[t][t]
            done = True
            for i in range(t + 1, rows):
                q = A[i][t] // pv
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = A[t][j] // pv
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                if A[t][j]:
                    done = False
            if not done:
                continue
            # divisibility: fold a non-divisible entry into the pivot row
            bad = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if A[i][j] % pv),
                None,
            )
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
    return [abs(A[t][t]) for t in range(n)]


def cokernel_orders(M: Sequence[Sequence[int]], cols: int | None = None) -> list[int]:
    """Cyclic orders of Z^cols / rowspace(M); 0 stands for a free factor."""
    rows = len(M)
    cols = len(M[0]) if rows else (cols or 0)
    d = smith_normal_form(M) if rows else []
    d = d + [0] * (cols - len(d))
    return [x for x in d if x != 1]


# ----------------------------------------------------------------------
# abelianization


def relation_matrix(G: PcPresentation) -> list[list[int]]:
    """Rows generating the relations of G/G': p e_i - pow_i and comm_{j,i}."""
    rows = []
    for i in range(G.m):
        v = [-e for e in G.power_rule(i)]
        v[i] += G.p
        rows.append(v)
    for j in range(G.m):
        for i in range(j):
            c = G.commutator_rule(j, i)
            if any(c):
                rows.append(list(c))
    return rows


def aqi(G: PcPresentation) -> AbelianTypeInvariants:
    """Abelian type invariants of G/G' from the Smith form of the relation matrix."""
    if G.m == 0:
        return AbelianTypeInvariants((), G.p)
    orders = cokernel_orders(relation_matrix(G), G.m)
    if any(d == 0 for d in orders):
        raise ValueError("abelianization of a finite group cannot be infinite")
    return AbelianTypeInvariants.from_orders(orders, G.p)


def abelian_invariants_of_subgroup(S) -> AbelianTypeInvariants:
    return aqi(S.presentation())


def abelian_quotient_order(G: PcPresentation) -> int:
    """|G/G'| via the derived subgroup, independently of the Smith form."""
    return G.order // derived_subgroup(G).order


def ati_from_census(counts: dict[int, int], p: int = 3) -> AbelianTypeInvariants:
    """ATI of an abelian p-group from ``{k: #elements of order dividing p^k}``.

    Uses #{x : x^(p^k) = 1} = p^(sum_i min(k, e_i)); the number of cyclic
    factors with exponent >= k is the k-th difference of the logarithms.
    """
    kmax = max(counts)
    logs = [0]
    for k in range(1, kmax + 1):
        logs.append(valuation(counts[k], p))
    at_least = [logs[k] - logs[k - 1] for k in range(1, kmax + 1)]
    exps = []
    for k in range(1, kmax + 1):
        nxt = at_least[k] if k < kmax else 0
        exps += [k] * (at_least[k - 1] - nxt)
    return AbelianTypeInvariants.from_exponents(exps, p)
