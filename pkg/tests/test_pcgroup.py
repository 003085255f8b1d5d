import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fp_oracle import fp_group
from towerlab.blackburn import BlackburnParams, construct
from towerlab.catalog import get_entry
from towerlab.pcgroup import (
    Homomorphism,
    PcPresentation,
    PresentationError,
    Subgroup,
    abelianization,
    center,
    coclass,
    derived_length,
    derived_subgroup,
    first_layer,
    frattini_subgroup,
    lower_central_series,
    nilpotency_class,
    normal_closure,
    quotient,
    subgroup,
    two_step_centralizer,
    whole_group,
)
from towerlab.tables import element_orders, inverse_table, multiplication_table

SMALL_GROUPS = ["81.3", "81.13", "G(0,4,1,0)", "G(0,4,0,1)"]


def group(spec):
    if spec.startswith("G("):
        return construct(BlackburnParams.parse(spec))
    return get_entry(spec).group()


# ---------------------------------------------------------------- oracles


@pytest.mark.parametrize("spec", SMALL_GROUPS + ["243.5", "243.7"])
def test_order_matches_coset_enumeration(spec):
    G = group(spec)
    assert fp_group(G).order() == G.order


def test_243_5_collection_values(g243_5):
    G = g243_5
    x, y, s2, s3, t3 = G.gens()
    xy = G.mul(x, y)
    assert G.pow(xy, 3) == G.pow(t3, 2)
    assert G.comm(s2, xy) == G.mul(s3, t3)
    assert G.comm(s2, G.mul(x, G.pow(y, 2))) == G.mul(s3, G.pow(t3, 2))
    assert derived_subgroup(G).order == 27
    assert derived_length(G) == 2
    assert nilpotency_class(G) == 3
    assert subgroup(G, [y, s2]).order == 81
    assert subgroup(G, [x]).order == 9


def test_relations_hold(g243_5):
    G = g243_5
    for kind, idx, rhs in G.rules():
        if kind == "pow":
            assert G.pow(G.gen(idx[0]), 3) == rhs
        else:
            j, i = idx
            assert G.comm(G.gen(j), G.gen(i)) == rhs


def test_inconsistent_presentation_rejected():
    # x^3 = y with y central of order 3 and [y,x] = y cannot be consistent
    with pytest.raises(PresentationError):
        PcPresentation(["x", "y"], {"x": "y"}, {("y", "x"): "y"})


def test_word_parsing_and_formatting(g243_5):
    G = g243_5
    g = G.word("x^2 s2^-1 t3")
    assert G.format_element(g) == "x^2 s2^2 t3"
    assert G.collect("x y") == G.mul(G.gen("x"), G.gen("y"))
    assert G.collect([1, -2]) == G.mul(G.gen(0), G.inv(G.gen(1)))


# ---------------------------------------------------------------- confluence

letters = st.lists(st.sampled_from([1, 2, 3, 4, 5, -1, -2, -3, -4, -5]), max_size=30)


@given(letters, letters)
def test_collection_confluence(a, b):
    """Stack collector, recursive multiplication and the table agree."""
    G = group("243.5")
    by_stack = G.collect(a + b)
    by_mul = G.identity
    for k in a + b:
        g = G.gen(abs(k) - 1)
        by_mul = G.mul(by_mul, g if k > 0 else G.inv(g))
    left, right = G.collect(a), G.collect(b)
    T = G.table
    assert by_stack == by_mul == G.mul(left, right)
    assert G.element_at(int(T[G.index(left), G.index(right)])) == by_mul


@given(st.sampled_from(SMALL_GROUPS), st.data())
def test_table_agrees_with_mul(spec, data):
    G = group(spec)
    T = G.table
    i = data.draw(st.integers(0, G.order - 1))
    j = data.draw(st.integers(0, G.order - 1))
    assert G.element_at(int(T[i, j])) == G.mul(G.element_at(i), G.element_at(j))


def test_table_is_group():
    G = group("81.13")
    T = multiplication_table(G)
    N = G.order
    assert (np.sort(T, axis=1) == np.arange(N)).all()
    assert (T[T[:, 1][:, None], np.arange(N)] == T[:, T[1]]).all()
    inv = inverse_table(T)
    assert (T[np.arange(N), inv] == 0).all()
    orders = element_orders(T, 3)
    assert orders[0] == 1 and set(orders.tolist()) <= {1, 3, 9, 27, 81}


# ---------------------------------------------------------------- subgroups


def test_subgroup_membership_and_cosets(g243_5):
    G = g243_5
    S = subgroup(G, [G.gen("y"), G.gen("s2")])
    assert S.index == 3
    members = set(S.elements())
    assert len(members) == S.order
    assert all(g in S for g in members)
    reps = list(S.transversal())
    cosets = {frozenset(G.mul(h, r) for h in members) for r in reps}
    assert len(cosets) == len(reps)
    for g in itertools.islice(G.elements(), 0, 243, 7):
        assert S.coset_rep(g) in reps
        assert G.mul(g, G.inv(S.coset_rep(g))) in S


def test_characteristic_series(g243_5):
    G = g243_5
    lcs = lower_central_series(G)
    assert [S.order for S in lcs] == [243, 27, 9, 1]
    assert frattini_subgroup(G).order == 27
    assert center(G).order == 9  # s3, t3 central by the defining relations
    # gamma_4 = 1, so chi_2 centralizes G', and only Phi commutes with s2
    assert two_step_centralizer(G) == frattini_subgroup(G)
    assert coclass(G) == 2
    assert normal_closure(G, [G.gen("s2")]).order == 27


def test_first_layer(g243_5):
    G = g243_5
    layer = first_layer(G)
    assert len(layer) == 4
    Phi = frattini_subgroup(G)
    assert all(S.index == 3 and Phi <= S and S.is_normal() for S in layer)
    assert len(set(layer)) == 4
    assert set(first_layer(G, "lex")) == set(layer)


def test_quotient_and_homomorphism(g243_5):
    G = g243_5
    D = derived_subgroup(G)
    Q, proj = quotient(G, D)
    assert Q.order == 9 and Q.is_abelian()
    assert proj.kernel() == D
    A, _ = abelianization(G)
    assert A.order == 9
    S = first_layer(G)[0]
    to_quotient = proj.compose(S.embedding())
    assert to_quotient.source is S.presentation()
    assert to_quotient.image().order == 3
    assert to_quotient.kernel().order == S.order // 3


def test_homomorphism_rejects_non_relation():
    G = group("81.3")
    with pytest.raises(ValueError):
        Homomorphism(G, G, [G.gen(0), G.identity, G.gen(2), G.gen(3)])


def relabelled(G, tails):
    """Isomorphic copy of G on the pc sequence g_i * (deeper tail)."""
    new = []
    for i, tail in enumerate(tails):
        v = [0] * G.m
        v[i] = 1
        for k in range(i + 1, G.m):
            v[k] = tail[k] if k < len(tail) else 0
        new.append(G.mul(G.gen(i), G.collect([k + 1 for k in range(i + 1, G.m) for _ in range(v[k])])) if any(v[i + 1 :]) else G.gen(i))
    return Subgroup(G, tuple(new)).presentation()


@given(st.sampled_from(SMALL_GROUPS + ["243.5", "243.7"]), st.lists(st.lists(st.integers(0, 2), min_size=5, max_size=5), min_size=5, max_size=5))
def test_characteristic_series_under_relabelling(spec, tails):
    G = group(spec)
    P = relabelled(G, tails[: G.m])
    assert P.order == G.order
    assert [S.order for S in lower_central_series(P)] == [S.order for S in lower_central_series(G)]
    assert derived_length(P) == derived_length(G)
    assert center(P).order == center(G).order
    assert frattini_subgroup(P).order == frattini_subgroup(G).order
    assert two_step_centralizer(P).order == two_step_centralizer(G).order


@given(st.sampled_from(SMALL_GROUPS + ["243.5", "243.7"]), st.integers(0, 3))
def test_derived_length_of_maximal_subgroups(spec, i):
    G = group(spec)
    S = first_layer(G)[i].presentation()
    assert derived_length(S) <= derived_length(G)
