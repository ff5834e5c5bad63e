"""Coalgebras, algebras, comodules, modules and twisting cochains."""

import pytest
from sympy.polys.domains import QQ

from exceptions import GradingMismatch, MaurerCartanViolated, NotAssociative, NotCoassociative, NotConilpotent
from koszul.barcobar import CobarAlgebra, universal_tau
from koszul.dgstruct import (
    ONE,
    DGAlgebra,
    DGCoalgebra,
    DGComodule,
    DualModule,
    RegularModule,
    TrivialModule,
    TwistingCochain,
    check_mc,
    comodule_map_failures,
    enveloping_algebra,
    require_mc,
)


def tensor_coalgebra(length=3, K=QQ):
    """Cofree coalgebra on one letter of degree 1, words up to `length`, deconcatenation."""
    words = ["a" * k for k in range(1, length + 1)]
    coproduct = {w: {(w[:i], w[i:]): K.one for i in range(1, len(w))} for w in words}
    return DGCoalgebra({w: len(w) for w in words}, coproduct, {}, K, name="T^c(a)")


def dual_numbers(K=QQ):
    return DGAlgebra({"x": 0}, {}, {}, K, name="k[x]/x^2")


# ── coalgebras ──


def test_tensor_coalgebra_verifies():
    C = tensor_coalgebra()
    assert C.verify()
    assert C.conilpotency_depth() == 3
    assert C.weight("aa") == 2
    assert C.coproduct("a") == {(ONE, "a"): QQ.one, ("a", ONE): QQ.one}
    assert C.opposite().verify()


def test_coassociativity_failure():
    degrees = {"x": 1, "y": 1, "z": 2, "w": 3}
    coproduct = {"z": {("x", "y"): QQ.one}, "w": {("x", "z"): QQ.one}}
    C = DGCoalgebra(degrees, coproduct, {}, QQ, name="broken")
    assert C.coassociativity_failures() == ["w"]
    with pytest.raises(NotCoassociative):
        C.verify()


def test_cocommutativity_flag_is_checked():
    degrees = {"x": 0, "y": 0, "z": 0}
    C = DGCoalgebra(degrees, {"z": {("x", "y"): QQ.one}}, {}, QQ, cocommutative=True)
    assert C.cocommutativity_failures() == ["z"]
    with pytest.raises(NotCoassociative):
        C.verify()


def test_coproduct_cycle_is_not_conilpotent():
    with pytest.raises(NotConilpotent):
        DGCoalgebra({"p": 0, "q": 0}, {"p": {("p", "q"): QQ.one}}, {}, QQ)


def test_grading_is_enforced():
    with pytest.raises(GradingMismatch):
        DGCoalgebra({"x": 1, "y": 1}, {"y": {("x", "x"): QQ.one}}, {}, QQ)
    with pytest.raises(GradingMismatch):
        DGCoalgebra({"x": 1}, {}, {}, QQ, curvature={"x": QQ.one})
    with pytest.raises(GradingMismatch):
        DGCoalgebra({ONE: 0}, {}, {}, QQ)


def test_ground_coalgebra():
    k = DGCoalgebra.ground(QQ)
    assert k.basis() == [ONE]
    assert k.verify()


# ── algebras ──


def test_dual_numbers_and_enveloping_algebra():
    A = dual_numbers()
    assert A.verify()
    Ae = enveloping_algebra(A)
    assert len(Ae.labels) == 3
    assert Ae.mul(("x", ONE), (ONE, "x")) == {("x", "x"): QQ.one}
    assert Ae.verify()


def test_non_associative_product():
    product = {("x", "x"): {"y": QQ.one}, ("y", "x"): {"z": QQ.one}}
    A = DGAlgebra({"x": 0, "y": 0, "z": 0}, product, {}, QQ)
    with pytest.raises(NotAssociative):
        A.verify()


def test_product_must_preserve_degree():
    with pytest.raises(GradingMismatch):
        DGAlgebra({"x": 1, "y": 1}, {("x", "x"): {"y": QQ.one}}, {}, QQ)


def test_modules_over_dual_numbers():
    A = dual_numbers()
    assert RegularModule(A).action_failures(1) == []
    assert TrivialModule(A).action_failures(1) == []
    D = DualModule(A)
    assert D.action_failures(1) == []
    assert D.left_act("x", ("*", "x")) == {("*", ONE): QQ.one}


# ── twisting cochains ──


def test_universal_tau_is_maurer_cartan():
    C = tensor_coalgebra()
    tau = universal_tau(C, 3)
    assert check_mc(tau)
    require_mc(tau, 3)


def test_wrong_sign_tau_fails_maurer_cartan():
    C = tensor_coalgebra()
    Om = CobarAlgebra(C, 3)
    bad = TwistingCochain(C, Om, lambda c: {(c,): -QQ.one}, name="minus")
    assert not check_mc(bad)
    assert set(bad.mc_failures()) == {"aa", "aaa"}
    with pytest.raises(MaurerCartanViolated):
        require_mc(bad)


# ── comodules ──


def test_regular_and_trivial_comodules():
    C = tensor_coalgebra()
    E = DGComodule.regular(C)
    assert E.is_left and E.is_right
    assert E.verify()
    assert DGComodule.trivial(C).verify()
    assert E.dual().verify()
    assert E.dual().degree(("*", "aa")) == -2


def test_comodule_counit_axiom():
    C = tensor_coalgebra()
    assert DGComodule.regular(C).counit_failures() == []
    # a coaction term on the unit of C duplicates 1 (x) m
    doubled = DGComodule(C, {"m": 0}, {}, left={"m": {(ONE, "m"): QQ.one}}, name="m")
    assert doubled.counit_failures() == ["counit at 'm'"]
    with pytest.raises(NotCoassociative):
        doubled.verify()
    shifted = DGComodule(C, {"m": 0, "n": 0}, {}, left={"m": {("a", "n"): QQ.one}}, name="mn")
    assert shifted.counit_failures() == ["coaction degree at 'm'"]


def test_comodule_map_failures():
    C = tensor_coalgebra()
    E = DGComodule.regular(C)
    assert comodule_map_failures(E, E, lambda m: {m: QQ.one}, 0) == []
    only_a = lambda m: {"a": QQ.one} if m == "a" else {}  # noqa: E731
    assert "aa" in comodule_map_failures(E, E, only_a, 0)
