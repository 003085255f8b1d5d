"""The coclass-1 family G_a^n(z, w) of 3-groups and checks of its maximal subgroups."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .abelian import AbelianTypeInvariants, aqi, format_ati
from .pcgroup import (
    Element,
    PcPresentation,
    PresentationError,
    Subgroup,
    derived_length,
    first_layer,
    nilpotency_class,
    two_step_centralizer,
)


@dataclass(frozen=True)
class BlackburnParams:
    """Parameters of G_a^n(z, w); ``n`` is the index of nilpotency (|G| = 3^n)."""

    n: int
    a: int = 0
    z: int = 0
    w: int = 0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("n must be at least 3")
        if self.a not in (0, 1):
            raise ValueError("a must be 0 or 1")
        if self.z not in (-1, 0, 1) or self.w not in (-1, 0, 1):
            raise ValueError("z and w must lie in {-1, 0, 1}")
        if self.a == 1 and self.n < 5:
            raise ValueError("a = 1 requires n >= 5")
        if self.n == 3 and (self.z != 0 or self.w not in (0, 1)):
            raise ValueError("n = 3 requires z = 0 and w in {0, 1}")

    def __str__(self) -> str:
        return f"G({self.a},{self.n},{self.z},{self.w})"

    @classmethod
    def parse(cls, text: str) -> BlackburnParams:
        """Parse the ``G(a,n,z,w)`` syntax."""
        m = re.fullmatch(r"\s*G\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*", text)
        if not m:
            raise ValueError(f"expected G(a,n,z,w), got {text!r}")
        a, n, z, w = map(int, m.groups())
        return cls(n, a, z, w)


def all_params(n: int) -> list[BlackburnParams]:
    """Every valid parameter set of order 3^n."""
    out = []
    for a in (0, 1):
        for z in (-1, 0, 1):
            for w in (-1, 0, 1):
                try:
                    out.append(BlackburnParams(n, a, z, w))
                except ValueError:
                    pass
    return out


def labels(n: int) -> list[str]:
    return ["x", "y"] + [f"s{i}" for i in range(2, n)]


def construct(params: BlackburnParams) -> PcPresentation:
    """Pc presentation of G_a^n(z, w) on x, y, s2, ..., s_{n-1}.

    Defining relations: s2 = [y,x], s_i = [s_{i-1},x] (s_n = 1),
    [y,s2] = s_{n-1}^a, [y,s_i] = 1 for i >= 3, G' abelian, x^3 = s_{n-1}^w,
    y^3 s2^3 s3 = s_{n-1}^z, s_i^3 s_{i+1}^3 s_{i+2} = 1 (2 <= i <= n-3) and
    s_{n-2}^3 = s_{n-1}^3 = 1.  The non-triangular power relations are solved
    for the left-most generator and collected by the constructor.
    """
    n, a, z, w = params.n, params.a, params.z, params.w
    top = f"s{n - 1}"

    def s(i: int) -> str | None:
        return f"s{i}" if 2 <= i <= n - 1 else None

    def word(*parts: tuple[str | None, int]) -> str:
        return " ".join(f"{g}^{e}" for g, e in parts if g is not None and e)

    comms: dict[tuple[str, str], str] = {("y", "x"): "s2"}
    for i in range(2, n - 1):
        comms[(f"s{i}", "x")] = f"s{i + 1}"
    if a:
        comms[("y", "s2")] = word((top, a))
    powers: dict[str, str] = {
        "x": word((top, w)),
        # y^3 = s_{n-1}^z s3^-1 s2^-3
        "y": word((top, z), (s(3), -1), (s(2), -3)),
    }
    for i in range(2, n - 2):
        powers[f"s{i}"] = word((s(i + 2), -1), (s(i + 1), -3))
    return PcPresentation(labels(n), powers, comms)


# ----------------------------------------------------------------------
# power relations


LEMMA_IDENTITIES = (
    ("(xy)^2", "x y x y", "x^2 y^2 s2 t3"),
    ("(xy)^3", "x y x y x y", "x^3 y^3 s2^3 s3 t3^2"),
    ("(xy^2)^2", "x y^2 x y^2", "x^2 y^4 s2^2 t3^2"),
    ("(xy^2)^3", "x y^2 x y^2 x y^2", "x^3 y^6 s2^6 s3^2 t3^2"),
)


@dataclass
class LemmaReport:
    applicable: bool
    results: dict[str, bool] = field(default_factory=dict)
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.applicable and all(self.results.values())

    def __str__(self) -> str:
        if not self.applicable:
            return f"inapplicable: {self.reason}"
        return ", ".join(f"{k}: {'ok' if v else 'FAIL'}" for k, v in self.results.items())


def verify_power_lemma(G: PcPresentation, x: Element, y: Element) -> LemmaReport:
    """Check the second and third powers of xy and xy^2 by collection.

    With s2 = [y,x], s3 = [s2,x] and t3 = [s2,y], the identities need t3
    central of order dividing 3 and [s3,y] = 1; otherwise the report is
    marked inapplicable.
    """
    s2 = G.comm(y, x)
    s3 = G.comm(s2, x)
    t3 = G.comm(s2, y)
    if any(G.comm(t3, g) != G.identity for g in G.gens()):
        return LemmaReport(False, reason="t3 is not central")
    if G.pow(t3, 3) != G.identity:
        return LemmaReport(False, reason="t3 does not have order dividing 3")
    if G.comm(s3, y) != G.identity:
        return LemmaReport(False, reason="[s3,y] is not trivial")
    env = {"x": x, "y": y, "s2": s2, "s3": s3, "t3": t3}

    def ev(text: str) -> Element:
        r = G.identity
        for tok in text.split():
            name, _, e = tok.partition("^")
            r = G.mul(r, G.pow(env[name], int(e) if e else 1))
        return r

    results = {name: ev(lhs) == ev(rhs) for name, lhs, rhs in LEMMA_IDENTITIES}
    return LemmaReport(True, results)


def verify_power_lemma_params(params: BlackburnParams) -> LemmaReport:
    G = construct(params)
    return verify_power_lemma(G, G.gen("x"), G.gen("y"))


# ----------------------------------------------------------------------
# maximal subgroups


# (a, z, w) -> omega for H2, H3, H4, each isomorphic to G_0^{n-1}(0, omega)
NONABELIAN_TABLE: dict[tuple[int, int, int], tuple[int, int, int]] = {
    (0, 0, 0): (0, 0, 0),
    (0, 0, 1): (1, 1, 1),
    (0, 1, 0): (0, 1, 1),
    (0, -1, 0): (0, 1, 1),
    (1, 0, -1): (1, 0, 0),
    (1, 0, 0): (0, 1, 1),
    (1, 0, 1): (1, 1, 1),
}

# n = 3: types of H1..H4
ABELIAN_TABLE: dict[tuple[int, int, int], tuple[str, str, str, str]] = {
    (0, 0, 0): ("1^2", "1^2", "1^2", "1^2"),
    (0, 0, 1): ("1^2", "2", "2", "2"),
}


def table_rows(n: int) -> list[BlackburnParams]:
    """Parameter sets covered by the maximal-subgroup tables at order 3^n."""
    keys = ABELIAN_TABLE if n == 3 else NONABELIAN_TABLE
    return [BlackburnParams(n, a, z, w) for (a, z, w) in keys if a == 0 or n >= 5]


def maximal_subgroup_types(params: BlackburnParams) -> tuple:
    """Tabulated types of the maximal subgroups.

    For n = 3 the four ATIs of H1..H4, otherwise the parameters of H2, H3, H4
    in the family of order 3^(n-1).
    """
    key = (params.a, params.z, params.w)
    if params.n == 3:
        return ABELIAN_TABLE[key]
    if key not in NONABELIAN_TABLE:
        raise KeyError(f"no table row for {params}")
    return tuple(BlackburnParams(params.n - 1, 0, 0, om) for om in NONABELIAN_TABLE[key])


def family_candidates(n: int) -> list[tuple[str, PcPresentation]]:
    """Reference groups of order 3^n used to name a maximal subgroup."""
    ws = (0, 1) if n == 3 else (0, 1, -1)
    if n < 3:
        return []
    return [(str(P), construct(P)) for P in (BlackburnParams(n, 0, 0, w) for w in ws)]


@dataclass
class MaximalSubgroupReport:
    params: BlackburnParams
    expected: tuple
    found: tuple
    h1_abelian: bool | None
    h1_type: str
    ok: bool

    def __str__(self) -> str:
        exp = ",".join(map(str, self.expected))
        got = ",".join(map(str, self.found))
        return f"{self.params}: expected [{exp}] found [{got}] H1 {self.h1_type} {'ok' if self.ok else 'MISMATCH'}"


def identify_in_family(S: PcPresentation, n: int) -> list[str]:
    """Names G(0,n,0,w) of family members isomorphic to S."""
    from .isomorphism import are_isomorphic

    return [name for name, H in family_candidates(n) if are_isomorphic(S, H)]


def verify_maximal_subgroups(params: BlackburnParams) -> MaximalSubgroupReport:
    """Compare the computed maximal subgroups of G_a^n(z, w) with the table row."""
    G = construct(params)
    layer = first_layer(G)
    expected = maximal_subgroup_types(params)
    if params.n == 3:
        found = tuple(format_ati(aqi(S.presentation())) if S.presentation().is_abelian() else "nonabelian" for S in layer)
        h1 = layer[0].presentation()
        return MaximalSubgroupReport(params, expected, found, h1.is_abelian(), format_ati(aqi(h1)), found == expected)
    found_l = []
    ok = True
    for S, exp in zip(layer[1:], expected):
        names = identify_in_family(S.presentation(), params.n - 1)
        # G(0,m,0,-1) and G(0,m,0,1) coincide, report the table representative
        canon = {str(exp)} if str(exp) in names else set()
        if canon:
            found_l.append(exp)
        else:
            ok = False
            found_l.append("/".join(names) if names else "?")
    h1 = layer[0].presentation()
    h1_ab = h1.is_abelian()
    h1_type = format_ati(aqi(h1)) if h1_ab else "nonabelian"
    if params.a == 0:
        ok = ok and h1_ab and h1.order == 3 ** (params.n - 1)
    return MaximalSubgroupReport(params, expected, tuple(found_l), h1_ab, h1_type, ok)


def nearly_homocyclic(n: int) -> AbelianTypeInvariants:
    """Type of A(3, n): order 3^n, rank 2 (n >= 2), exponents ceil(n/2), floor(n/2)."""
    if n == 1:
        return AbelianTypeInvariants(((1, 1),))
    return AbelianTypeInvariants.from_exponents([(n + 1) // 2, n // 2])


def is_chi2_h1(params: BlackburnParams) -> bool:
    """True when the first layer member H1 coincides with the two-step centralizer."""
    G = construct(params)
    return first_layer(G)[0] == two_step_centralizer(G)


def summary(params: BlackburnParams) -> dict:
    G = construct(params)
    return {
        "group": str(params),
        "order": G.order,
        "class": nilpotency_class(G),
        "derived_length": derived_length(G),
        "aqi": format_ati(aqi(G)),
    }
