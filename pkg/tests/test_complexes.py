"""Chain complexes, chain maps, homology, cones."""

import pytest
from sympy.polys.domains import QQ, ZZ

from exceptions import DifferentialNotSquareZero, GradingMismatch, NotAChainMap
from homology.complexes import ChainComplex, ChainMap, cone, homology, is_quasi_iso, quasi_iso_failures


def interval(K=QQ, scale=1):
    """Two vertices and an edge with d(e) = scale * (b - a)."""
    basis = {0: ["a", "b"], 1: ["e"]}

    def d(lab):
        return {"b": K.convert(scale), "a": -K.convert(scale)} if lab == "e" else {}

    return ChainComplex.from_operator(basis, d, K, name="I")


def test_interval_homology():
    table = homology(interval(), (0, 1))
    assert table.betti() == (1, 0)
    assert table.as_dict()["0"]["rank"] == 1


def test_torsion_over_integers():
    table = homology(interval(ZZ, scale=2), (0, 1))
    assert table.rank(0) == 1
    assert table.groups[0].torsion == [2]
    assert homology(interval(QQ, scale=2), (0, 1)).groups[0].torsion == []


def test_differential_leaving_basis():
    with pytest.raises(GradingMismatch):
        ChainComplex.from_operator({0: ["a"], 1: ["e"]}, lambda lab: {"z": QQ.one} if lab == "e" else {}, QQ)


def test_square_zero_check():
    basis = {0: ["a"], 1: ["b"], 2: ["c"]}
    steps = {"c": {"b": QQ.one}, "b": {"a": QQ.one}}
    bad = ChainComplex.from_operator(basis, lambda lab: steps.get(lab, {}), QQ)
    with pytest.raises(DifferentialNotSquareZero):
        bad.check_square_zero()


def test_homology_checks_square_zero_on_the_window():
    basis = {0: ["a"], 1: ["b"], 2: ["c"]}
    steps = {"c": {"b": QQ.one}, "b": {"a": QQ.one}}
    bad = ChainComplex.from_operator(basis, lambda lab: steps.get(lab, {}), QQ, name="bad")
    with pytest.raises(DifferentialNotSquareZero) as err:
        homology(bad, (0, 2))
    assert err.value.context["degree"] == 2
    assert err.value.context["complex"] == "bad"
    # H_0 only needs d_0 d_1, which vanishes
    assert homology(bad, (0, 0)).betti() == (0,)


def test_identity_cone_is_acyclic():
    C = interval()
    ident = ChainMap.from_operator(C, C, 0, lambda lab: {lab: QQ.one}, name="id")
    assert not ident.failures()
    assert homology(cone(ident), (0, 2)).is_zero()
    assert is_quasi_iso(ident, (0, 1))


def test_zero_map_is_not_quasi_iso():
    C = interval()
    zero = ChainMap.from_operator(C, C, 0, lambda lab: {}, name="0")
    assert quasi_iso_failures(zero, (0, 2)) == [0, 1]


def test_quasi_iso_check_carries_window_and_trust():
    C = interval()
    check = is_quasi_iso(ChainMap.from_operator(C, C, 0, lambda lab: {lab: QQ.one}), (0, 1))
    assert check.holds and check.definitive
    assert check.window == (0, 1)
    assert check.trusted == [0, 1]
    assert check.as_dict()["failures"] == []

    cut = ChainComplex.from_operator({0: ["a", "b"], 1: ["e"]},
                                     lambda lab: {"b": QQ.one, "a": -QQ.one} if lab == "e" else {},
                                     QQ, complete=lambda n: n <= 1)
    partial = is_quasi_iso(ChainMap.from_operator(cut, cut, 0, lambda lab: {lab: QQ.one}), (0, 2))
    assert partial.holds
    assert partial.trusted == [0]
    assert partial.untrusted == [1, 2]
    assert not partial.definitive

    zero = is_quasi_iso(ChainMap.from_operator(C, C, 0, lambda lab: {}), (0, 2))
    assert not zero
    assert zero.failures == [0, 1]


def test_not_a_chain_map():
    C = interval()
    f = ChainMap.from_operator(C, C, 0, lambda lab: {"a": QQ.one} if lab == "a" else {}, name="bad")
    with pytest.raises(NotAChainMap):
        f.check()
    with pytest.raises(NotAChainMap):
        cone(f)


def test_trust_flags_follow_completeness():
    basis = {0: ["a"], 1: ["b"], 2: ["c"]}
    C = ChainComplex.from_operator(basis, lambda lab: {}, QQ, complete=lambda n: n <= 1)
    assert C.trusted(0)
    assert not C.trusted(1)
    table = homology(C, (0, 2))
    assert table.trusted_degrees() == [0]


def test_shifted_map_cone_degrees():
    # point in degree 0 mapped with degree 2 onto a point in degree 2
    P0 = ChainComplex.from_operator({0: ["p"]}, lambda lab: {}, QQ)
    P2 = ChainComplex.from_operator({2: ["q"]}, lambda lab: {}, QQ)
    f = ChainMap.from_operator(P0, P2, 2, lambda lab: {"q": QQ.one})
    assert is_quasi_iso(f, (0, 4))
