import json

import pytest

from towerlab.artin import TransferKernelType, ap_equivalent, artin_pattern, is_equivalent, parse_pattern
from towerlab.blackburn import BlackburnParams, construct
from towerlab.catalog import (
    CITED,
    builtin_entries,
    export_json,
    get_entry,
    identify,
    identify_pattern,
    isomorphic,
    load_json,
    maximal_subgroup_multiset,
    resolution_log,
)
from towerlab.pcgroup import PcPresentation


def test_required_entries_present():
    ids = {e.id for e in builtin_entries()}
    for gid in ("243.5", "243.7", "81.3", "81.13", "81.7", "81.8", "81.10", "27.3", "27.4", "27.5", "243.26", "243.27"):
        assert gid in ids
    assert {f"729.{i}" for i in range(96, 102)} <= ids
    for gid in ("243.5", "243.7", "81.3", "81.13"):
        assert get_entry(gid).kind == "presentation"
    assert get_entry("729.99").kind == "fingerprint"


def test_cited_metadata():
    assert get_entry("243.5").metadata["d2"] == 2
    assert get_entry("243.5").metadata["type"] == "D.10"
    assert get_entry("243.7").metadata["type"] == "D.5"
    assert get_entry("27.3").metadata["d2"] == 4
    assert get_entry("243.27").metadata["kappa"] == "1000"


def test_family_resolution():
    # pinned by matching cited patterns against the four groups of order 3^4
    assert get_entry("81.7").params == BlackburnParams(4, 0, 1, 0)
    assert get_entry("81.8").params == BlackburnParams(4, 0, -1, 0)
    assert get_entry("81.10").params == BlackburnParams(4, 0, 0, 1)
    assert get_entry("27.3").params == BlackburnParams(3, 0, 0, 0)
    assert get_entry("27.4").params == BlackburnParams(3, 0, 0, 1)
    assert get_entry("243.26").params == BlackburnParams(5, 0, 0, 0)
    assert get_entry("243.27").params.n == 5
    assert get_entry("243.26").params != get_entry("243.27").params
    assert len(resolution_log()) == 7


def test_243_26_27_kernel_types():
    k26 = artin_pattern(get_entry("243.26").group(), 2).kappa
    k27 = artin_pattern(get_entry("243.27").group(), 2).kappa
    assert k26.digits == (0, 0, 0, 0)
    assert is_equivalent(k27, TransferKernelType.from_string("1000"))


@pytest.mark.parametrize("e", [e for e in builtin_entries() if e.group() is not None], ids=lambda e: e.id)
def test_stored_pattern_matches_computed(e):
    computed = artin_pattern(e.group(), 2)
    assert ap_equivalent(computed, e.ap2)
    if "ap2" in e.metadata:
        assert ap_equivalent(computed, parse_pattern(e.metadata["ap2"]))


@pytest.mark.parametrize("gid", ["243.5", "243.7", "81.3", "81.13", "81.7", "81.8", "81.10", "27.3", "27.4", "27.5", "243.26", "243.27"])
def test_self_identification(gid):
    assert identify(get_entry(gid).group(), 2) == [gid]


def test_identify_pattern_examples():
    assert identify_pattern(parse_pattern("([1^2;(1^3,1^2,1^2,1^2)],[1;(2000)])")) == ["81.7"]
    assert identify_pattern(parse_pattern("([1^2;(32,1^2,1^2,1^2)],[1;(2000)])")) == ["729.97", "729.98"]
    assert identify_pattern(parse_pattern("([1^2;(2^2,21,1^3,21)],[1;(0313)])")) == ["2187.284", "2187.291"]
    # patterns are compared up to relabelling of the first layer
    assert identify_pattern(parse_pattern("([1^2;(1^2,1^3,1^2,1^2)],[1;(0100)])")) == ["81.7"]


def test_identify_order_729_family_members():
    # G(0,6,0,1) carries the pattern of <729,96>; the order-2 pattern does not
    # separate 729.99..101, which all share the pattern of G(1,6,0,0)
    assert identify(construct(BlackburnParams(6, 0, 0, 1)), 2) == ["729.96"]
    assert identify(construct(BlackburnParams(6, 1, 0, 0)), 2) == ["729.99", "729.100", "729.101"]
    assert identify(construct(BlackburnParams(6, 0, 0, 0)), 2) == []


def test_isomorphic_status(g243_5):
    assert isomorphic(g243_5, g243_5) is True
    assert isomorphic(construct(BlackburnParams(3, 0, 0, 0)), construct(BlackburnParams(3, 0, 0, 1))) is False
    assert isomorphic(construct(BlackburnParams(8, 0, 0, 1)), construct(BlackburnParams(8, 0, 0, -1))) == "undecided"


def test_maximal_subgroup_multisets(g243_5, g243_7):
    assert maximal_subgroup_multiset(g243_5) == {"81.3": 3, "81.13": 1}
    assert maximal_subgroup_multiset(g243_7) == {"81.3": 2, "81.13": 2}
    C3xC3 = PcPresentation(["a", "b"], {}, {})
    assert maximal_subgroup_multiset(C3xC3) == {"3.1": 4}
    assert maximal_subgroup_multiset(get_entry("81.7").group()) == CITED["81.7"]["maximal_subgroups"]


def test_unidentified_member_reported_as_fingerprint():
    m = maximal_subgroup_multiset(construct(BlackburnParams(7, 0, 0, 0)))
    assert all(k.startswith("<order 729") for k in m)


def test_json_roundtrip():
    text = export_json()
    entries = load_json(text)
    assert [e.id for e in entries] == [e.id for e in builtin_entries()]
    for a, b in zip(entries, builtin_entries()):
        assert a.metadata == b.metadata
        assert a.kind == b.kind
        assert ap_equivalent(a.ap2, b.ap2)
    d = json.loads(text)["entries"][0]
    assert {"id", "order", "kind", "provenance", "ap2", "metadata"} <= set(d)
