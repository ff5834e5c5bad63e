"""Lie algebras, Chevalley-Eilenberg chains and Poincare duality by capping with theta."""

import pytest
from sympy.polys.domains import QQ

from exceptions import DifferentialNotSquareZero, GradingMismatch, JacobiViolated, SchemaError
from lie.algebra import LieAlgebra, abelian, builtin_lie
from lie.chevalley_eilenberg import ce_coalgebra, ce_complex, pd_class_cochain, pd_map
from services import catalog
from services.lie_service import ce_betti, one_sided_check


def broken():
    """[x, y] = y, [x, z] = z, [y, z] = x fails Jacobi."""
    brackets = {(0, 1): {1: QQ.one}, (0, 2): {2: QQ.one}, (1, 2): {0: QQ.one}}
    return LieAlgebra(["x", "y", "z"], brackets, QQ, name="broken")


@pytest.mark.parametrize("name,betti", [
    ("heisenberg", (1, 2, 2, 1)),
    ("sl2", (1, 0, 0, 1)),
    ("aff1", (1, 1, 0)),
    ("abelian2", (1, 2, 1)),
])
def test_ce_betti_numbers(name, betti):
    assert ce_betti(builtin_lie(name, QQ)).betti() == betti


@pytest.mark.parametrize("name,unimodular", [("heisenberg", True), ("sl2", True), ("aff1", False)])
def test_unimodularity(name, unimodular):
    assert builtin_lie(name, QQ).is_unimodular() is unimodular


def test_modular_character_of_aff1():
    assert builtin_lie("aff1", QQ).modular_character() == [QQ.one, QQ.zero]


def test_relabelling_preserves_invariants():
    g = builtin_lie("sl2", QQ).relabel([2, 0, 1])
    assert g.names == ["f", "h", "e"]
    assert not g.jacobi_failures()
    assert g.is_unimodular()
    assert ce_betti(g).betti() == (1, 0, 0, 1)


def test_jacobi_failure_breaks_square_zero():
    g = broken()
    assert g.jacobi_failures() == [(0, 1, 2)]
    with pytest.raises(JacobiViolated):
        g.check_jacobi()
    with pytest.raises(JacobiViolated):
        ce_coalgebra(g)
    with pytest.raises(DifferentialNotSquareZero):
        ce_complex(g).check_square_zero()


def test_bracket_table_validation():
    with pytest.raises(GradingMismatch):
        LieAlgebra(["x"], {(0, 0): {0: QQ.one}}, QQ)
    with pytest.raises(GradingMismatch):
        LieAlgebra(["x", "y"], {(0, 1): {1: QQ.one}, (1, 0): {1: QQ.one}}, QQ)
    with pytest.raises(GradingMismatch):
        LieAlgebra(["x", "y"], {(0, 2): {1: QQ.one}}, QQ)


def test_builtin_lookup():
    assert builtin_lie("abelian3", QQ).dim == 3
    assert builtin_lie("abelian(2)", QQ).dim == 2
    assert builtin_lie("so3", QQ) is None
    with pytest.raises(SchemaError):
        catalog.lie("so3", QQ)


def test_ce_coalgebra_is_cocommutative_dg_coalgebra():
    C = ce_coalgebra(builtin_lie("heisenberg", QQ))
    assert C.verify()
    assert C.conilpotency_depth() == 3
    assert ce_coalgebra(abelian(3, QQ)).verify()


def test_cap_with_theta():
    # twisted by the modular character the cap is always a chain map
    pd_map(builtin_lie("aff1", QQ))
    assert pd_map(builtin_lie("aff1", QQ), twisted=False).failures()
    assert not pd_map(builtin_lie("heisenberg", QQ), twisted=False).failures()


def test_one_sided_duality():
    assert one_sided_check(builtin_lie("heisenberg", QQ))["passed"]
    assert not one_sided_check(builtin_lie("aff1", QQ))["passed"]


def test_pd_class_is_cycle_with_vanishing_connes_image():
    cls = pd_class_cochain(builtin_lie("heisenberg", QQ))
    assert cls.degree == 3
    assert cls.is_cycle
    assert cls.B_image_zero
