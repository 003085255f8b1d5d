"""Artin transfers, transfer kernel types and recursive Artin patterns."""

from __future__ import annotations

import itertools
import json
from collections.abc import Sequence
from dataclasses import dataclass, field

from .abelian import AbelianTypeInvariants, aqi, format_ati, parse_ati
from .pcgroup import (
    Element,
    Homomorphism,
    PcPresentation,
    Subgroup,
    commutator_subgroup,
    derived_subgroup,
    first_layer,
    quotient,
    subgroup,
    whole_group,
)

MARKER = "*"


class TransferError(ValueError):
    pass


# ----------------------------------------------------------------------
# transfers


def _check_layer_member(G: PcPresentation, S: Subgroup) -> Subgroup:
    if S.group is not G:
        raise TransferError("subgroup belongs to a different group")
    if S.index != G.p:
        raise TransferError(f"subgroup has index {S.index}, expected {G.p}")
    D = derived_subgroup(G)
    if not D <= S:
        raise TransferError("subgroup does not contain the commutator subgroup")
    return D


def outside_element(G: PcPresentation, S: Subgroup) -> Element:
    """First canonical coset representative not in S."""
    return next(t for t in S.transversal() if t != G.identity)


def transfer_element(G: PcPresentation, S: Subgroup, g: Element, h: Element | None = None) -> Element:
    """Representative in S of T_{G,S}(g) for S normal of index p.

    g outside S maps to g^p; g inside S maps to prod_{i<p} h^-i g h^i for any
    h outside S.
    """
    p = G.p
    if g not in S:
        return G.pow(g, p)
    if h is None:
        h = outside_element(G, S)
    elif h in S:
        raise TransferError("h must lie outside S")
    r = G.identity
    hi = G.identity
    for _ in range(p):
        r = G.mul(r, G.conj(g, hi))
        hi = G.mul(hi, h)
    return r


def transfer_general(G: PcPresentation, U: Subgroup, g: Element, reps: Sequence[Element] | None = None) -> Element:
    """Representative in U of the transfer of g for any subgroup U.

    With right transversal R of U in G, ``r g = u_r rep(r g)`` and the
    transfer is the product of the ``u_r`` modulo U'.
    """
    reps = list(U.transversal()) if reps is None else list(reps)
    chosen = {U.coset_rep(r): r for r in reps}
    if len(chosen) != len(reps) or len(reps) != U.index:
        raise TransferError("reps is not a right transversal")
    r_all = G.identity
    for r in reps:
        rg = G.mul(r, g)
        rr = chosen[U.coset_rep(rg)]
        r_all = G.mul(r_all, G.mul(rg, G.inv(rr)))
    return r_all


@dataclass
class TransferMap:
    """T_{G,S} as a homomorphism between the abelianizations."""

    G: PcPresentation
    S: Subgroup
    hom: Homomorphism
    source_projection: Homomorphism
    target_projection: Homomorphism
    derived_S: Subgroup

    def __call__(self, g: Element) -> Element:
        """Image of an element of G in the abelianization of S."""
        return self.target_projection(self.S.coordinates(transfer_element(self.G, self.S, g)))

    def kernel(self) -> Subgroup:
        """Kernel as a subgroup of G containing G'."""
        return transfer_kernel(self.G, self.S)


def transfer_map(G: PcPresentation, S: Subgroup) -> TransferMap:
    """T_{G,S}: G/G' -> S/S' for a first-layer member S."""
    D = _check_layer_member(G, S)
    QG, projG = quotient(G, D)
    PS = S.presentation()
    QS, projS = quotient(PS, derived_subgroup(PS))
    free = [k for k in range(G.m) if k not in set(D.depths)]
    images = []
    for k in free:
        t = transfer_element(G, S, G.gen(k))
        images.append(projS(S.coordinates(t)))
    hom = Homomorphism(QG, QS, images)
    return TransferMap(G, S, hom, projG, projS, derived_in_parent(G, S))


def derived_in_parent(G: PcPresentation, S: Subgroup) -> Subgroup:
    """S' as a subgroup of G."""
    return commutator_subgroup(G, S, S)


def transfer_kernel(G: PcPresentation, S: Subgroup, h: Element | None = None) -> Subgroup:
    """ker T_{G,S} as a subgroup of G containing G'."""
    D = _check_layer_member(G, S)
    DS = derived_in_parent(G, S)
    keep = [t for t in D.transversal() if transfer_element(G, S, t, h) in DS]
    return subgroup(G, keep + list(D.igs))


# ----------------------------------------------------------------------
# transfer kernel types


@dataclass(frozen=True)
class TransferKernelType:
    """Kernels of the transfers to the first layer, in first-layer order.

    ``digits[i]`` is 0 when the i-th kernel is all of G/G', j when it equals
    the j-th layer member (1-based) modulo G', and None otherwise.  For
    abelianizations of rank other than 2 the digits are all None and only the
    raw kernels are meaningful.
    """

    digits: tuple[int | None, ...]
    raw_kernels: tuple[Subgroup, ...] = field(default=(), compare=False)
    encoded: bool = True

    @classmethod
    def from_string(cls, text: str) -> TransferKernelType:
        s = text.strip().strip("()")
        return cls(tuple(None if ch == MARKER else int(ch) for ch in s))

    def __str__(self) -> str:
        if not self.encoded:
            return "{" + ",".join(kernel_label(k) for k in self.raw_kernels) + "}"
        return "".join(MARKER if d is None else str(d) for d in self.digits)

    @property
    def has_marker(self) -> bool:
        return any(d is None for d in self.digits)

    def permuted(self, perm: Sequence[int]) -> TransferKernelType:
        return TransferKernelType(permute_digits(self.digits, perm), encoded=self.encoded)


def kernel_label(K: Subgroup) -> str:
    return f"|{K.order}|"


def permute_digits(digits: Sequence[int | None], perm: Sequence[int]) -> tuple[int | None, ...]:
    """Relabel the layer by ``perm`` (0-based): new[i] = perm^-1(old[perm[i]])."""
    inv = [0] * len(perm)
    for i, q in enumerate(perm):
        inv[q] = i
    out = []
    for i in range(len(perm)):
        d = digits[perm[i]]
        out.append(d if d in (0, None) else inv[d - 1] + 1)
    return tuple(out)


def tkt(G: PcPresentation, layer: Sequence[Subgroup] | None = None) -> TransferKernelType:
    """Transfer kernel type against ``layer`` (default :func:`first_layer`)."""
    if layer is None:
        layer = first_layer(G)
    whole = whole_group(G)
    kernels = tuple(transfer_kernel(G, S) for S in layer)
    encoded = len(layer) == G.p + 1 and aqi(G).rank == 2
    if not encoded:
        return TransferKernelType(tuple(None for _ in kernels), kernels, encoded=False)
    digits = []
    for K in kernels:
        if K == whole:
            digits.append(0)
        elif K in layer:
            digits.append(layer.index(K) + 1)
        else:
            digits.append(None)
    return TransferKernelType(tuple(digits), kernels)


def _orbit(digits: tuple[int | None, ...]):
    for perm in itertools.permutations(range(len(digits))):
        yield perm, permute_digits(digits, perm)


def canonical_tkt(k: TransferKernelType) -> TransferKernelType:
    """Lexicographically smallest member of the orbit under layer relabelling."""
    if not k.encoded:
        raise TransferError("digit encoding requires a rank-2 abelianization")
    if k.has_marker:
        raise TransferError("kernel type contains kernels outside the digit encoding")
    return TransferKernelType(min(d for _, d in _orbit(k.digits)))


def is_equivalent(k1: TransferKernelType, k2: TransferKernelType) -> bool:
    return canonical_tkt(k1).digits == canonical_tkt(k2).digits


# ----------------------------------------------------------------------
# Artin patterns


@dataclass
class ArtinPattern:
    """Node of an Artin pattern tree.

    ``kernel`` is the transfer kernel from the predecessor into this node
    (a digit, ``None`` for the marker, and ``"1"`` at the root, where the
    kernel is trivial).  ``children`` follow the first-layer order of the
    node's group.
    """

    order: int
    tau: AbelianTypeInvariants
    kernel: int | str | None = "1"
    children: list[ArtinPattern] = field(default_factory=list)
    kernel_desc: tuple = ()

    @property
    def kappa(self) -> TransferKernelType | None:
        """Kernel type of this node towards its children."""
        if not self.children:
            return None
        enc = all(isinstance(c.kernel, int) or c.kernel is None for c in self.children) and len(self.children) == 4 and self.tau.rank == 2
        if enc:
            return TransferKernelType(tuple(c.kernel for c in self.children))
        return TransferKernelType(tuple(None for _ in self.children), encoded=False)

    def kappa_string(self) -> str | None:
        if not self.children:
            return None
        return "".join(_kernel_str(c.kernel) for c in self.children)

    def tau_string(self) -> str:
        if not self.children:
            return format_ati(self.tau)
        return f"[{format_ati(self.tau)};({','.join(c.tau_string() for c in self.children)})]"

    def kappa_display(self) -> str:
        k = _kernel_str(self.kernel)
        if not self.children:
            return k
        parts = [c.kappa_display() for c in self.children]
        sep = "" if all(len(s) == 1 for s in parts) else ","
        return f"[{k};({sep.join(parts)})]"

    def __str__(self) -> str:
        return f"({self.tau_string()},{self.kappa_display()})"

    def truncate(self, n: int) -> ArtinPattern:
        if n < 1:
            raise ValueError("order must be positive")
        kids = [c.truncate(n - 1) for c in self.children] if n > 1 else []
        return ArtinPattern(n, self.tau, self.kernel, kids, self.kernel_desc)

    def to_dict(self) -> dict:
        return {
            "tau": format_ati(self.tau),
            "kappa": self.kappa_string(),
            "children": [c.to_dict() for c in self.children],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps({"order": self.order, "pattern": self.to_dict()}, indent=indent)

    def canonical_key(self) -> tuple:
        return canonical_key(self)

    def permuted(self, perm: Sequence[int]) -> ArtinPattern:
        """Relabel the children of this node by ``perm`` (digits transform accordingly)."""
        kids = [self.children[q] for q in perm]
        digits = permute_digits([c.kernel for c in self.children], perm)
        new = []
        for c, d in zip(kids, digits):
            new.append(ArtinPattern(c.order, c.tau, d, c.children, c.kernel_desc))
        return ArtinPattern(self.order, self.tau, self.kernel, new, self.kernel_desc)


def _kernel_str(k) -> str:
    return MARKER if k is None else str(k)


def artin_pattern(G: PcPresentation, n: int, layer_order: str = "auto") -> ArtinPattern:
    """AP of order n: tau and transfer kernels iterated through the first layers."""
    if n < 1:
        raise ValueError("order must be positive")
    return _pattern(G, n, "1", (), layer_order)


def _pattern(G: PcPresentation, n: int, kernel, desc, layer_order: str) -> ArtinPattern:
    node = ArtinPattern(n, aqi(G), kernel, [], desc)
    if n == 1 or G.m == 0:
        return node
    layer = first_layer(G, ordering=layer_order)
    if not layer:
        return node
    k = tkt(G, layer)
    D = derived_subgroup(G)
    for i, S in enumerate(layer):
        K = k.raw_kernels[i]
        # order-independent description of the kernel for non-encoded nodes
        kdesc = (K.log_order - D.log_order, K == S)
        child_kernel = k.digits[i] if k.encoded else None
        node.children.append(_pattern(S.presentation(), n - 1, child_kernel, kdesc, layer_order))
    return node


def canonical_key(ap: ArtinPattern) -> tuple:
    """Invariant of the pattern under simultaneous relabelling of every layer."""
    tau = format_ati(ap.tau)
    if not ap.children:
        return (tau,)
    kids = [canonical_key(c) for c in ap.children]
    k = ap.kappa
    if k is not None and k.encoded:
        digits = tuple(-1 if d is None else d for d in k.digits)
        best = None
        for perm in itertools.permutations(range(len(kids))):
            cand = (
                permute_digits([None if d == -1 else d for d in digits], perm),
                tuple(kids[q] for q in perm),
            )
            cand = (tuple(-1 if d is None else d for d in cand[0]), cand[1])
            if best is None or cand < best:
                best = cand
        return (tau, "enc", best)
    pairs = sorted(zip((c.kernel_desc for c in ap.children), kids))
    return (tau, "raw", tuple(pairs))


def ap_equivalent(a: ArtinPattern, b: ArtinPattern) -> bool:
    return a.order == b.order and canonical_key(a) == canonical_key(b)


def pattern_from_strings(tau_root: str, taus: Sequence[str], kappa: str) -> ArtinPattern:
    """Order-2 pattern from the usual display, e.g. ("1^2", ["21", ...], "2241")."""
    if len(taus) != len(kappa):
        raise ValueError("need one kernel digit per child")
    kids = [
        ArtinPattern(1, parse_ati(t), None if ch == MARKER else int(ch))
        for t, ch in zip(taus, kappa)
    ]
    return ArtinPattern(2, parse_ati(tau_root), "1", kids)


def parse_pattern(text: str) -> ArtinPattern:
    """Parse an order-2 display like ``([1^2;(21,21,1^3,21)],[1;(2241)])``."""
    s = "".join(text.split())
    s = s.replace("²", "^2").replace("³", "^3")
    if not (s.startswith("([") and s.endswith("])")):
        raise ValueError(f"cannot parse pattern {text!r}")
    tau_part, kappa_part = s[2:-2].split("],[")
    root, rest = tau_part.split(";")
    taus = rest.strip("()").split(",")
    _, kap = kappa_part.split(";")
    return pattern_from_strings(root, taus, kap.strip("()"))
