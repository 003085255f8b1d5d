"""Class groups of imaginary quadratic fields via reduced binary quadratic forms.

Single discriminants are handled by enumerating reduced forms.  Range scans
count reduced forms for a whole block of discriminants at once with numpy,
then determine the 3-Sylow structure only where 3 divides h, by projecting
prime forms to their 3-parts.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .abelian import AbelianTypeInvariants, ati_from_census, format_ati, valuation

THREADS_ENV = "TOWERLAB_THREADS"
DEFAULT_BLOCK = 200_000

# Cited counts for imaginary quadratic fields with lower_bound < d < 0.
EXPECTED_TABLE1 = {
    -10**6: {"divisible": 121645, "not_divisible": 182323, "total": 303968},
    -10**11: {"divisible": 13206088529, "not_divisible": 17190266523, "total": 30396355052},
    -10**12: {"divisible": 132584350621, "not_divisible": 171379200091, "total": 303963550712},
}
EXPECTED_RANK = {-10**6: {"rank_1": 118455, "rank_ge_2": 3190}}
EXPECTED_CYCLIC = {-10**6: {3: 80115, 9: 26458, 27: 8974, 81: 2472, 243: 393, 729: 43}}


class DiscriminantError(ValueError):
    pass


# ----------------------------------------------------------------------
# discriminants


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n % 4 == 0:
        return False
    q = 3
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        q += 2
    return True


def is_fundamental(d: int) -> bool:
    """True for fundamental discriminants d < 0."""
    if d >= 0:
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _require_fundamental(d: int) -> None:
    if not is_fundamental(d):
        raise DiscriminantError(f"{d} is not a negative fundamental discriminant")


# ----------------------------------------------------------------------
# forms


@dataclass(frozen=True, order=True)
class QuadForm:
    """The form a x^2 + b xy + c y^2 of discriminant b^2 - 4ac < 0."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return math.gcd(self.a, self.b, self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        return b >= 0 or (abs(b) != a and a != c)

    def reduce(self) -> QuadForm:
        a, b, c = self.a, self.b, self.c
        while True:
            if not (-a < b <= a):
                r = (a - b) // (2 * a)
                b, c = b + 2 * r * a, a * r * r + b * r + c
            if a > c:
                a, b, c = c, -b, a
                continue
            if a == c and b < 0:
                b = -b
            return QuadForm(a, b, c)

    def inverse(self) -> QuadForm:
        return QuadForm(self.a, -self.b, self.c).reduce()

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


def principal_form(d: int) -> QuadForm:
    b = d % 2
    return QuadForm(1, b, (b * b - d) // 4)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(u, v, g) with u a + v b = g = gcd(a, b) >= 0."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if a < 0:
        return -u0, -v0, -a
    return u0, v0, a


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Gauss composition of primitive forms of equal discriminant, reduced."""
    if f.discriminant != g.discriminant:
        raise DiscriminantError(f"discriminants differ: {f.discriminant} and {g.discriminant}")
    if f.a > g.a:
        f, g = g, f
    a1, b1 = f.a, f.b
    a2, b2, c2 = g.a, g.b, g.c
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        y1, _, d = _xgcd(a2, a1)
    if s % d == 0:
        x2, y2, d1 = 0, -1, d
    else:
        x2, v, d1 = _xgcd(s, d)
        y2 = -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return QuadForm(a3, b3, c3).reduce()


def form_pow(f: QuadForm, e: int) -> QuadForm:
    if e < 0:
        f, e = f.inverse(), -e
    r = principal_form(f.discriminant)
    base = f.reduce()
    while e:
        if e & 1:
            r = compose(r, base)
        e >>= 1
        if e:
            base = compose(base, base)
    return r


def form_order(f: QuadForm) -> int:
    """Order of the class of f, by repeated composition."""
    one = principal_form(f.discriminant)
    f = f.reduce()
    g, k = f, 1
    while g != one:
        g = compose(g, f)
        k += 1
    return k


def reduced_forms(d: int) -> list[QuadForm]:
    """All reduced primitive forms of discriminant d."""
    _require_fundamental(d)
    out = []
    bmax = math.isqrt(-d // 3)
    for b in range(d % 2, bmax + 1, 2):
        N = (b * b - d) // 4
        for a in range(max(b, 1), math.isqrt(N) + 1):
            if N % a:
                continue
            c = N // a
            if math.gcd(a, b, c) != 1:
                continue
            out.append(QuadForm(a, b, c))
            if 0 < b < a < c:
                out.append(QuadForm(a, -b, c))
    return sorted(out)


def class_number(d: int) -> int:
    return len(reduced_forms(d))


def _three_part_census(forms: list[QuadForm], h: int) -> dict[int, int]:
    """{k: #elements of Cl_3 with order dividing 3^k}."""
    v = valuation(h, 3)
    m = h // 3**v
    one = principal_form(forms[0].discriminant)
    counts = Counter()
    for f in forms:
        g, k = form_pow(f, m), 0
        while g != one:
            g = form_pow(g, 3)
            k += 1
        counts[k] += 1
    # every 3-part is hit m times
    return {k: sum(c for j, c in counts.items() if j <= k) // m for k in range(v + 1)}


def sylow3_ati(d: int) -> AbelianTypeInvariants:
    forms = reduced_forms(d)
    h = len(forms)
    if h % 3:
        return AbelianTypeInvariants(())
    return ati_from_census(_three_part_census(forms, h), 3)


def three_rank(d: int) -> int:
    return sylow3_ati(d).rank


def tower_length_zero(d: int) -> bool:
    """True iff 3 does not divide h(d), i.e. the 3-class tower is trivial."""
    return class_number(d) % 3 != 0


def first_layer_count(d: int) -> int:
    """Number of unramified cyclic cubic extensions, (3^rank - 1) / 2."""
    return (3 ** three_rank(d) - 1) // 2


# ----------------------------------------------------------------------
# batch computation over a block of discriminants


def class_numbers_block(D0: int, D1: int) -> np.ndarray:
    """Number of reduced forms of discriminant -D for D0 <= D < D1.

    Counts reduced triples with 4ac - b^2 in range; imprimitive forms are
    included, which does not matter for fundamental discriminants.
    """
    counts = np.zeros(D1 - D0, dtype=np.int64)
    amax = math.isqrt(max(D1 - 1, 0) // 3)
    for a in range(1, amax + 1):
        b = np.arange(-a + 1, a + 1, dtype=np.int64)
        clo = max(a, -(-D0 // (4 * a)))
        chi = (D1 - 1 + a * a) // (4 * a)
        if chi < clo:
            continue
        c = np.arange(clo, chi + 1, dtype=np.int64)
        D = 4 * a * c[None, :] - (b * b)[:, None]
        ok = (D >= D0) & (D < D1)
        # a = c forces b >= 0
        ok &= (c[None, :] > a) | (b[:, None] >= 0)
        counts += np.bincount((D[ok] - D0).ravel(), minlength=D1 - D0)
    return counts


def fundamental_mask_block(D0: int, D1: int) -> np.ndarray:
    """Whether -D is a fundamental discriminant, for D0 <= D < D1."""
    D = np.arange(D0, D1, dtype=np.int64)
    sf = np.ones(D1 - D0, dtype=bool)
    qmax = math.isqrt(max(D1 - 1, 1))
    sieve = np.ones(qmax + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(qmax) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    for q in np.nonzero(sieve)[0].tolist():
        q2 = q * q
        start = -(-D0 // q2) * q2
        sf[start - D0 :: q2] = False
    # -D = 1 mod 4 squarefree, or -D = 4m with m = 2, 3 mod 4 squarefree
    mask = ((-D) % 4 == 1) & sf
    quarter = D // 4
    qsf = np.zeros(D1 - D0, dtype=bool)
    idx = np.nonzero(D % 4 == 0)[0]
    if len(idx):
        qsf[idx] = _sf_lookup(quarter[idx])
    mask |= (D % 4 == 0) & ((-quarter) % 4 != 0) & ((-quarter) % 4 != 1) & qsf
    mask &= D >= 3
    return mask


def _sf_lookup(m: np.ndarray) -> np.ndarray:
    lo, hi = int(m.min()), int(m.max()) + 1
    sf = np.ones(hi - lo, dtype=bool)
    for q in range(2, math.isqrt(max(hi - 1, 1)) + 1):
        q2 = q * q
        start = -(-lo // q2) * q2
        sf[start - lo :: q2] = False
    return sf[m - lo]


_ROOTS: dict[int, dict[int, int]] = {}


def _primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    s = np.ones(n + 1, dtype=bool)
    s[:2] = False
    for q in range(2, math.isqrt(n) + 1):
        if s[q]:
            s[q * q :: q] = False
    return np.nonzero(s)[0].tolist()


def prime_form(d: int, ell: int) -> QuadForm | None:
    """The reduced class of a form (ell, b, c) of discriminant d, if ell is not inert."""
    if ell == 2:
        r = d % 8
        if r == 1:
            return QuadForm(2, 1, (1 - d) // 8).reduce()
        if r == 0:
            return QuadForm(2, 0, -d // 8).reduce()
        if r == 4:
            return QuadForm(2, 2, (4 - d) // 8).reduce()
        return None
    roots = _ROOTS.get(ell)
    if roots is None:
        roots = {x * x % ell: x for x in range(ell)}
        _ROOTS[ell] = roots
    b = roots.get(d % ell)
    if b is None:
        return None
    if (b - d) % 2:
        b = ell - b
    return QuadForm(ell, b, (b * b - d) // (4 * ell)).reduce()


def three_structure(d: int, h: int) -> tuple[int, int]:
    """(rank class, v) of Cl_3 for fundamental d with 3 | h.

    Returns (1, v) if Cl_3 is cyclic of order 3^v, (2, v) if its rank is at
    least 2.  Prime forms with ell <= sqrt(|d|/3) generate the class group,
    so Cl_3 is cyclic iff one of their 3-parts has order 3^v.  It is not
    cyclic as soon as a 3-part of order at most that of the longest one seen
    so far lies outside the cyclic group that one generates.
    """
    v = valuation(h, 3)
    if v == 0:
        return 0, 0
    if v == 1:
        return 1, 1
    m = h // 3**v
    one = principal_form(d)
    best: set[QuadForm] = {one}
    for ell in _primes_upto(math.isqrt(-d // 3)):
        f = prime_form(d, ell)
        if f is None:
            continue
        g = form_pow(f, m)
        if g == one:
            continue
        powers = [one, g]
        while True:
            nxt = compose(powers[-1], g)
            if nxt == one:
                break
            powers.append(nxt)
        if len(powers) == 3**v:
            return 1, v
        if len(powers) >= len(best):
            if not best <= set(powers):
                return 2, v
            best = set(powers)
        elif g not in best:
            return 2, v
    raise RuntimeError(f"prime forms failed to determine the 3-class group of {d}")


@dataclass
class ScanReport:
    lower: int
    upper: int = 0
    total: int = 0
    divisible: int = 0
    not_divisible: int = 0
    rank_1: int = 0
    rank_ge_2: int = 0
    cyclic: dict[int, int] = field(default_factory=dict)

    def merge(self, other: ScanReport) -> ScanReport:
        cyc = Counter(self.cyclic)
        cyc.update(other.cyclic)
        return ScanReport(
            min(self.lower, other.lower),
            max(self.upper, other.upper),
            self.total + other.total,
            self.divisible + other.divisible,
            self.not_divisible + other.not_divisible,
            self.rank_1 + other.rank_1,
            self.rank_ge_2 + other.rank_ge_2,
            dict(sorted(cyc.items())),
        )

    def reconciles(self) -> bool:
        return (
            self.divisible + self.not_divisible == self.total
            and self.rank_1 + self.rank_ge_2 == self.divisible
            and sum(self.cyclic.values()) == self.rank_1
        )

    def rows(self) -> list[tuple[int, str, int, int | None, bool | None]]:
        """(bound, statistic, count, cited, match) for every statistic."""
        L = self.lower
        exp1 = EXPECTED_TABLE1.get(L, {})
        exp_r = EXPECTED_RANK.get(L, {})
        exp_c = EXPECTED_CYCLIC.get(L, {})
        stats: list[tuple[str, int, int | None]] = [
            ("total", self.total, exp1.get("total")),
            ("divisible", self.divisible, exp1.get("divisible")),
            ("not_divisible", self.not_divisible, exp1.get("not_divisible")),
            ("rank_1", self.rank_1, exp_r.get("rank_1")),
            ("rank_ge_2", self.rank_ge_2, exp_r.get("rank_ge_2")),
        ]
        orders = sorted(set(self.cyclic) | set(exp_c))
        stats += [(f"cyclic_{o}", self.cyclic.get(o, 0), exp_c.get(o)) for o in orders]
        return [(L, name, n, e, None if e is None else n == e) for name, n, e in stats]

    def matches(self) -> bool:
        """True when every cited statistic for this bound is reproduced."""
        return all(m is not False for *_, m in self.rows())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bound", "statistic", "count", "cited_expected", "match"])
        for L, name, n, e, m in self.rows():
            w.writerow([L, name, n, "" if e is None else e, "" if m is None else str(m).lower()])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "total": self.total,
            "divisible": self.divisible,
            "not_divisible": self.not_divisible,
            "rank_1": self.rank_1,
            "rank_ge_2": self.rank_ge_2,
            "cyclic": {str(k): v for k, v in self.cyclic.items()},
        }


def scan_block(D0: int, D1: int, records: bool = False) -> tuple[ScanReport, list[dict]]:
    """Statistics for fundamental d with D0 <= -d < D1."""
    h = class_numbers_block(D0, D1)
    fund = fundamental_mask_block(D0, D1)
    rep = ScanReport(lower=-D1, upper=-D0 + 1)
    rep.total = int(fund.sum())
    div = fund & (h % 3 == 0)
    rep.divisible = int(div.sum())
    rep.not_divisible = rep.total - rep.divisible
    cyc = Counter()
    out = []
    ranked = {}
    for i in np.nonzero(div)[0].tolist():
        d = -(D0 + i)
        r, v = three_structure(d, int(h[i]))
        ranked[i] = (r, v)
        if r == 1:
            rep.rank_1 += 1
            cyc[3**v] += 1
        else:
            rep.rank_ge_2 += 1
    rep.cyclic = dict(sorted(cyc.items()))
    if records:
        for i in np.nonzero(fund)[0].tolist():
            d = -(D0 + i)
            if i not in ranked:
                ati = "()"
                rank = 0
            elif ranked[i][0] == 1:
                ati, rank = format_ati(AbelianTypeInvariants.from_exponents([ranked[i][1]])), 1
            else:
                A = sylow3_ati(d)
                ati, rank = format_ati(A), A.rank
            out.append({"d": d, "h": int(h[i]), "sylow3_ati": ati, "rank": rank})
    return rep, out


def _blocks(L: int, block: int) -> list[tuple[int, int]]:
    D1 = -L  # fundamental d with L < d < 0, i.e. 1 <= -d < -L
    return [(D0, min(D0 + block, D1)) for D0 in range(1, D1, block)]


def _scan_task(args) -> tuple[ScanReport, list[dict]]:
    return scan_block(*args)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def scan(L: int, threads: int | None = None, block: int = DEFAULT_BLOCK, records: bool = False) -> ScanReport | tuple[ScanReport, list[dict]]:
    """Aggregate statistics over fundamental discriminants L < d < 0.

    Blocks do not depend on the thread count, and merging is componentwise
    addition, so the result is identical for every ``threads``.  With
    ``records`` the per-discriminant rows are returned as well, ordered by
    decreasing d.
    """
    if L >= 0:
        raise DiscriminantError("lower bound must be negative")
    threads = default_threads() if threads is None else threads
    tasks = [(D0, D1, records) for D0, D1 in _blocks(L, block)]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(_scan_task, tasks))
    else:
        parts = [_scan_task(t) for t in tasks]
    rep = ScanReport(lower=L)
    rows: list[dict] = []
    for part, recs in parts:
        rep = rep.merge(part)
        rows += recs
    rep.lower, rep.upper = L, 0
    return (rep, rows) if records else rep


def json_lines(rows: list[dict]) -> Iterator[str]:
    for r in rows:
        yield json.dumps(r, sort_keys=True)
