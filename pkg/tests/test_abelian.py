import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from towerlab.abelian import (
    ATIParseError,
    AbelianTypeInvariants,
    abelian_quotient_order,
    aqi,
    ati_from_census,
    cokernel_orders,
    format_ati,
    format_ati_tuple,
    parse_ati,
    parse_ati_tuple,
    smith_normal_form,
)
from towerlab.catalog import get_entry


def test_format_examples():
    assert format_ati(AbelianTypeInvariants.from_exponents([2, 1])) == "21"
    assert format_ati(AbelianTypeInvariants.from_exponents([1, 1, 1])) == "1^3"
    assert format_ati(AbelianTypeInvariants.from_exponents([3, 2])) == "32"
    assert format_ati(AbelianTypeInvariants.from_exponents([2, 2])) == "2^2"
    assert format_ati(AbelianTypeInvariants(())) == "()"
    assert AbelianTypeInvariants.from_orders([1, 9, 3, 2]).exponents == [2, 1]


def test_parse_errors():
    with pytest.raises(ATIParseError) as e:
        parse_ati("12")
    assert e.value.pos == 1
    with pytest.raises(ATIParseError):
        parse_ati("2x")
    with pytest.raises(ValueError):
        format_ati(AbelianTypeInvariants.from_exponents([10]))


@given(st.lists(st.integers(1, 9), max_size=14))
def test_format_parse_roundtrip(exps):
    a = AbelianTypeInvariants.from_exponents(exps)
    assert parse_ati(format_ati(a)) == a
    assert a.log_order == sum(exps)
    assert a.rank == len(exps)


def test_tuple_roundtrip():
    items = [parse_ati(s) for s in ("21", "1^3", "21", "21")]
    assert format_ati_tuple(items) == "(21,1^3,21,21)"
    assert parse_ati_tuple("(21,1^3,21,21)") == items


def test_smith_examples():
    assert smith_normal_form([[1, 0], [0, 1]]) == [1, 1]
    assert smith_normal_form([[3, 0], [0, 9]]) == [3, 9]
    assert smith_normal_form([[2, 4], [6, 8]]) == [2, 4]
    assert cokernel_orders([[3, 0, 0]]) == [3, 0, 0]


def hom_count(M, cols, q):
    """#{x in (Z/q)^cols : M x = 0 mod q} = |Hom(coker M, Z/q)|, by enumeration."""
    n = 0
    for x in itertools.product(range(q), repeat=cols):
        if all(sum(a * b for a, b in zip(row, x)) % q == 0 for row in M):
            n += 1
    return n


matrices = st.integers(1, 3).flatmap(
    lambda cols: st.lists(st.lists(st.integers(-9, 9), min_size=cols, max_size=cols), min_size=1, max_size=4)
)


@given(matrices)
def test_smith_against_brute_force_cokernel(M):
    cols = len(M[0])
    orders = cokernel_orders(M)
    for q in (2, 3, 4, 5, 6, 9):
        predicted = math.prod(q if d == 0 else math.gcd(d, q) for d in orders)
        assert predicted == hom_count(M, cols, q)


@given(matrices)
def test_smith_divisibility_chain(M):
    d = [x for x in smith_normal_form(M) if x]
    assert all(b % a == 0 for a, b in zip(d, d[1:]))


@pytest.mark.parametrize(
    "gid, expected",
    [("243.5", "1^2"), ("243.7", "1^2"), ("81.3", "21"), ("81.13", "1^3"), ("27.2", "21"), ("9.1", "2")],
)
def test_aqi_of_catalog_groups(gid, expected):
    G = get_entry(gid).group()
    A = aqi(G)
    assert format_ati(A) == expected
    # independent route: |G/G'| from the derived subgroup
    assert A.order == abelian_quotient_order(G)


@given(st.lists(st.integers(1, 4), max_size=4))
def test_ati_from_census(exps):
    # census of an abelian group with the given exponents, by formula
    counts = {k: 3 ** sum(min(k, e) for e in exps) for k in range(max(exps, default=0) + 1)}
    assert ati_from_census(counts).exponents == sorted(exps, reverse=True)


def test_ati_from_census_by_enumeration():
    # C9 x C3 enumerated: orders dividing 1, 3, 9
    elems = [(a, b) for a in range(9) for b in range(3)]

    def order(v):
        k = 1
        while ((v[0] * k) % 9, (v[1] * k) % 3) != (0, 0):
            k += 1
        return k

    counts = {k: sum(1 for v in elems if 3**k % order(v) == 0) for k in range(3)}
    assert format_ati(ati_from_census(counts)) == "21"
