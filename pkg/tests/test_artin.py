import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from towerlab.artin import (
    TransferError,
    TransferKernelType,
    ap_equivalent,
    artin_pattern,
    canonical_key,
    canonical_tkt,
    derived_in_parent,
    is_equivalent,
    parse_pattern,
    permute_digits,
    tkt,
    transfer_element,
    transfer_general,
    transfer_kernel,
    transfer_map,
)
from towerlab.blackburn import BlackburnParams, construct
from towerlab.catalog import builtin_entries, get_entry
from towerlab.pcgroup import commutator_subgroup, derived_subgroup, first_layer, subgroup, whole_group

RANK2 = ["243.5", "243.7", "81.7", "81.8", "81.10", "27.3", "27.4", "243.26", "243.27"]
CATALOG_GROUPS = [e.id for e in builtin_entries() if e.group() is not None and e.order > 3]


def G_of(gid):
    return get_entry(gid).group()


# ---------------------------------------------------------------- cited values


def test_243_5_pattern():
    ap = artin_pattern(G_of("243.5"), 2)
    assert ap_equivalent(ap, parse_pattern("([1^2;(21,21,1^3,21)],[1;(2241)])"))
    assert is_equivalent(ap.kappa, TransferKernelType.from_string("2241"))


def test_243_7_pattern():
    ap = artin_pattern(G_of("243.7"), 2)
    assert ap_equivalent(ap, parse_pattern("([1^2;(1^3,21,1^3,21)],[1;(4224)])"))
    assert is_equivalent(ap.kappa, TransferKernelType.from_string("4224"))


def test_distinct_types_are_not_equivalent():
    assert not is_equivalent(TransferKernelType.from_string("2241"), TransferKernelType.from_string("4224"))
    assert canonical_tkt(TransferKernelType.from_string("1000")).digits == (0, 0, 0, 4)


def test_frozen_patterns():
    # computed once and frozen; the layer order is H1 = <y, Phi>, <x y^k, Phi>
    assert str(artin_pattern(G_of("243.5"), 2)) == "([1^2;(21,1^3,21,21)],[1;(3144)])"
    assert str(artin_pattern(G_of("243.7"), 2)) == "([1^2;(21,1^3,21,1^3)],[1;(1133)])"
    assert str(artin_pattern(construct(BlackburnParams(4, 0, 1, 0)), 2)) == "([1^2;(1^3,1^2,1^2,1^2)],[1;(2000)])"


def test_non_rank2_nodes_are_marked():
    ap = artin_pattern(G_of("27.5"), 2)
    assert ap.kappa_string() == "*" * 13
    assert not ap.kappa.encoded


# ---------------------------------------------------------------- transfers


@pytest.mark.parametrize("gid", ["243.5", "243.7", "81.13"])
def test_transfer_independent_of_h(gid):
    G = G_of(gid)
    for S in first_layer(G):
        DS = derived_in_parent(G, S)
        outside = [t for t in S.transversal() if t != G.identity]
        for g in S.igs:
            vals = [transfer_element(G, S, g, G.mul(h, s)) for h in outside for s in S.igs[:2]]
            assert all(DS.sift(G.mul(v, G.inv(vals[0]))) == G.identity for v in vals)


@given(st.sampled_from(["243.5", "243.7", "81.3"]), st.integers(0, 3), st.data())
def test_transfer_independent_of_representatives(gid, i, data):
    G = G_of(gid)
    layer = first_layer(G)
    S = layer[i % len(layer)]
    DS = derived_in_parent(G, S)
    members = list(S.elements())
    reps = [G.mul(data.draw(st.sampled_from(members)), r) for r in S.transversal()]
    for g in G.gens():
        a = transfer_general(G, S, g)
        b = transfer_general(G, S, g, reps)
        c = transfer_element(G, S, g)
        assert DS.sift(G.mul(a, G.inv(b))) == G.identity
        assert DS.sift(G.mul(a, G.inv(c))) == G.identity


@pytest.mark.parametrize("gid", RANK2)
def test_kernel_image_sizes(gid):
    G = G_of(gid)
    D = derived_subgroup(G)
    for S in first_layer(G):
        T = transfer_map(G, S)
        K = transfer_kernel(G, S)
        assert D <= K
        assert (K.order // D.order) * T.hom.image().order == G.order // D.order
        assert T.kernel() == K


def test_transfer_rejects_bad_subgroups():
    G = G_of("243.5")
    with pytest.raises(TransferError):
        transfer_kernel(G, subgroup(G, [G.gen("s2")]))
    with pytest.raises(TransferError):
        transfer_element(G, first_layer(G)[0], G.gen("s2"), G.gen("y"))


@pytest.mark.parametrize("gid", CATALOG_GROUPS)
def test_transfer_functoriality(gid):
    """T_{G,U} = T_{S,U} o T_{G,S} for U of index p in S of index p."""
    G = G_of(gid)
    for S in first_layer(G):
        P, emb = S.presentation(), S.embedding()
        for U in first_layer(P):
            UG = subgroup(G, [emb(h) for h in U.igs])
            UGd = commutator_subgroup(G, UG, UG)
            for g in G.gens():
                direct = transfer_general(G, UG, g)
                via = emb(transfer_general(P, U, S.coordinates(transfer_element(G, S, g))))
                assert UGd.sift(G.mul(direct, G.inv(via))) == G.identity


# ---------------------------------------------------------------- kernel types


@given(st.sampled_from(RANK2), st.permutations(range(4)))
def test_canonical_tkt_invariant_under_layer_reordering(gid, perm):
    G = G_of(gid)
    layer = first_layer(G)
    k = tkt(G, layer)
    k2 = tkt(G, [layer[q] for q in perm])
    assert k2.digits == permute_digits(k.digits, perm)
    assert canonical_tkt(k2) == canonical_tkt(k)


@given(st.lists(st.integers(0, 4), min_size=4, max_size=4), st.permutations(range(4)), st.permutations(range(4)))
def test_permutation_action(digits, p, q):
    d = tuple(digits)
    composed = tuple(p[q[i]] for i in range(4))
    assert permute_digits(permute_digits(d, p), q) == permute_digits(d, composed)
    assert canonical_tkt(TransferKernelType(permute_digits(d, p))) == canonical_tkt(TransferKernelType(d))


# ---------------------------------------------------------------- patterns


@pytest.mark.parametrize("gid", ["243.5", "81.7", "27.4"])
def test_truncation(gid):
    G = G_of(gid)
    ap3 = artin_pattern(G, 3)
    assert ap_equivalent(ap3.truncate(2), artin_pattern(G, 2))
    assert ap_equivalent(ap3.truncate(1), artin_pattern(G, 1))


@given(st.sampled_from(RANK2), st.permutations(range(4)))
def test_pattern_key_invariant_under_relabelling(gid, perm):
    ap = artin_pattern(G_of(gid), 2)
    assert canonical_key(ap.permuted(perm)) == canonical_key(ap)


def test_lex_and_auto_orderings_agree_up_to_relabelling():
    G = G_of("243.7")
    assert ap_equivalent(artin_pattern(G, 2, "lex"), artin_pattern(G, 2, "auto"))


def test_pattern_json():
    ap = artin_pattern(G_of("243.5"), 2)
    d = json.loads(ap.to_json())
    assert d["order"] == 2
    assert d["pattern"]["tau"] == "1^2"
    assert d["pattern"]["kappa"] == "3144"
    assert [c["tau"] for c in d["pattern"]["children"]] == ["21", "1^3", "21", "21"]
    assert all(c["kappa"] is None for c in d["pattern"]["children"])


@pytest.mark.parametrize("text", ["([1^2;(21,21,1^3,21)],[1;(2241)])", "([1^2;(32,1^2,1^2,1^2)],[1;(2000)])"])
def test_parse_display_roundtrip(text):
    assert str(parse_pattern(text)) == text
