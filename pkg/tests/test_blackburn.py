import pytest

from towerlab.abelian import aqi, format_ati
from towerlab.blackburn import (
    BlackburnParams,
    all_params,
    construct,
    is_chi2_h1,
    maximal_subgroup_types,
    nearly_homocyclic,
    table_rows,
    verify_maximal_subgroups,
    verify_power_lemma,
    verify_power_lemma_params,
)
from towerlab.pcgroup import PcPresentation, coclass, first_layer, nilpotency_class


def test_parameter_validation():
    with pytest.raises(ValueError):
        BlackburnParams(4, a=1)
    with pytest.raises(ValueError):
        BlackburnParams(3, z=1)
    with pytest.raises(ValueError):
        BlackburnParams(3, w=-1)
    with pytest.raises(ValueError):
        BlackburnParams(5, z=2)
    with pytest.raises(ValueError):
        BlackburnParams.parse("G(0,5,0)")
    assert BlackburnParams.parse("G(1,6,0,-1)") == BlackburnParams(6, 1, 0, -1)
    assert str(BlackburnParams(6, 1, 0, -1)) == "G(1,6,0,-1)"


@pytest.mark.parametrize("n", range(3, 8))
def test_family_is_coclass_one(n):
    for P in all_params(n):
        G = construct(P)
        assert G.order == 3**n
        assert nilpotency_class(G) == n - 1
        assert coclass(G) == 1


def test_a1_at_order_81_is_consistent_but_excluded():
    # the defining relations with a = 1, n = 4 give a consistent presentation
    n = 4
    comms = {("y", "x"): "s2", ("s2", "x"): "s3", ("y", "s2"): "s3"}
    powers = {"y": "s3^-1 s2^-3"}
    G = PcPresentation(["x", "y", "s2", "s3"], powers, comms)
    assert G.order == 81
    with pytest.raises(ValueError):
        BlackburnParams(n, a=1)


def test_power_lemma_values():
    for P in (BlackburnParams(6, 0, 1, 0), BlackburnParams(6, 1, 0, 0)):
        rep = verify_power_lemma_params(P)
        assert rep.applicable and rep.ok


def test_power_lemma_inapplicable_report():
    # with x and y swapped, t3 = [[x,y],x] is not central in G(1,5,0,0)
    G = construct(BlackburnParams(5, 1, 0, 0))
    rep = verify_power_lemma(G, G.gen("y"), G.gen("x"))
    assert not rep.applicable
    assert "inapplicable" in str(rep)


def test_table_rows_and_types():
    assert len(table_rows(3)) == 2
    assert len(table_rows(4)) == 4
    assert len(table_rows(5)) == 7
    assert maximal_subgroup_types(BlackburnParams(5, 1, 0, -1)) == (
        BlackburnParams(4, 0, 0, 1),
        BlackburnParams(4, 0, 0, 0),
        BlackburnParams(4, 0, 0, 0),
    )


@pytest.mark.parametrize("P", table_rows(3) + table_rows(4) + table_rows(5), ids=str)
def test_maximal_subgroups_small(P):
    assert verify_maximal_subgroups(P).ok


def test_h1_types():
    # frozen from computation: H1 is nearly homocyclic except for G(0,4,1,0)
    def h1(P):
        return format_ati(aqi(first_layer(construct(P))[0].presentation()))

    assert h1(BlackburnParams(4, 0, 0, 0)) == "21"
    assert h1(BlackburnParams(4, 0, 1, 0)) == "1^3"
    assert h1(BlackburnParams(5, 0, 0, 1)) == "2^2"
    assert h1(BlackburnParams(6, 0, 0, 0)) == "32"
    assert format_ati(nearly_homocyclic(5)) == "32"
    assert format_ati(nearly_homocyclic(3)) == "21"


def test_h1_is_two_step_centralizer():
    for P in table_rows(5):
        assert is_chi2_h1(P)
