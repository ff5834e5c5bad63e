"""Mixed complexes, Hochschild and coHochschild homology, negative cyclic lifts."""

import pytest
from sympy.polys.domains import QQ

from exceptions import NotACycle, WindowNotTrusted
from homology.complexes import homology
from koszul.cyclic import betti_compare, cohochschild_complex, hochschild_complex, lift_to_negative_cyclic
from koszul.dgstruct import ONE, DGAlgebra, DGCoalgebra
from lie.algebra import builtin_lie
from lie.chevalley_eilenberg import ce_coalgebra
from models.report import Verdict
from services.catalog import sphere_minimal


def dual_numbers():
    return DGAlgebra({"x": 0}, {}, {}, QQ, name="k[x]/x^2")


def cofree(letter_degree, length=4, K=QQ):
    words = ["a" * k for k in range(1, length + 1)]
    coproduct = {w: {(w[:i], w[i:]): K.one for i in range(1, len(w))} for w in words}
    return DGCoalgebra({w: letter_degree * len(w) for w in words}, coproduct, {}, K, name="T^c(a)")


def test_hochschild_of_dual_numbers():
    mixed = hochschild_complex(dual_numbers(), 6, (0, 4))
    assert mixed.failures() == []
    table = mixed.hochschild_homology((0, 4))
    assert table.betti() == (2, 1, 1, 1, 1)
    assert table.trusted_degrees() == [0, 1, 2, 3, 4]


def test_cyclic_homology_of_ground_field():
    mixed = hochschild_complex(DGAlgebra.ground(QQ), 2, (0, 4), N=3)
    assert homology(mixed.cyclic(3, (0, 4)), (0, 4)).betti() == (1, 0, 1, 0, 1)
    assert homology(mixed.negative_cyclic(3, (-4, 0)), (-4, 0)).betti() == (1, 0, 1, 0, 1)


def test_cohochschild_mixed_identities():
    assert cohochschild_complex(cofree(2), 4, (0, 4)).failures() == []
    g = builtin_lie("heisenberg", QQ)
    assert cohochschild_complex(ce_coalgebra(g), 3, (0, 3), N=2).failures() == []


def test_empty_window_rejected():
    with pytest.raises(WindowNotTrusted):
        cohochschild_complex(cofree(2), 3, (2, 1))
    with pytest.raises(WindowNotTrusted):
        hochschild_complex(dual_numbers(), 3, (2, 1))


def test_betti_compare_on_cofree_coalgebra():
    result = betti_compare(cofree(2), 4, (0, 3))
    assert result.trusted_degrees
    assert result.passed
    assert result.as_dict()["mismatches"] == []


def test_betti_compare_without_trusted_degrees_is_filtered():
    # cobar letters of C_*(g) sit in degree 0, so no degree is complete
    result = betti_compare(ce_coalgebra(builtin_lie("heisenberg", QQ)), 3, (0, 2))
    assert result.trusted_degrees == []
    assert result.untrusted_degrees == [0, 1, 2]
    assert not result.passed
    assert result.verdict == Verdict.VERIFIED_FILTERED
    assert result.as_dict()["verdict"] == "VERIFIED_FILTERED"


def test_betti_compare_on_sphere_minimal_model():
    result = betti_compare(sphere_minimal(QQ), 5, (0, 3))
    assert result.trusted_degrees == [0, 1, 2, 3]
    assert result.mismatches == []
    assert result.verdict == Verdict.VERIFIED


def test_unit_lifts_to_negative_cyclic():
    mixed = hochschild_complex(dual_numbers(), 6, (0, 4))
    lift = lift_to_negative_cyclic(mixed, {((), ONE): QQ.one}, 0, 3)
    assert lift.complete
    assert len(lift.stages) == 3


def test_connes_operator_obstructs_lift():
    # B(x) = [x] (x) 1 is not a Hochschild boundary in characteristic zero
    mixed = hochschild_complex(dual_numbers(), 6, (0, 4))
    lift = lift_to_negative_cyclic(mixed, {((), "x"): QQ.one}, 0, 3)
    assert not lift.complete
    assert lift.obstruction_stage == 1
    obs = lift.obstruction
    assert obs.degree == 1
    assert obs.cycle
    # HH_1 of the dual numbers has rank 1 and the class is nonzero in it
    assert len(obs.classes) == len(obs.coordinates) == 1
    assert obs.coordinates[0] != 0


def test_lift_requires_cycle():
    mixed = hochschild_complex(dual_numbers(), 6, (0, 4))
    with pytest.raises(NotACycle):
        lift_to_negative_cyclic(mixed, {(("x", "x"), ONE): QQ.one}, 2, 2)
