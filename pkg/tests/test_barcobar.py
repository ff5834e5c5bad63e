"""Cobar and bar constructions, their twisting cochains and resolutions."""

import pytest
from sympy.polys.domains import QQ

from exceptions import GradingMismatch, InfiniteRankSource, MaurerCartanViolated, NotAugmented, WindowNotTrusted
from homology.complexes import homology
from koszul.barcobar import (
    CobarAlgebra,
    bar,
    bar_tau,
    counit_resolution,
    opposite_reversal_failures,
    reverse_word,
    universal_tau,
)
from koszul.dgstruct import (
    ONE,
    DGAlgebra,
    DGCoalgebra,
    DGComodule,
    RegularModule,
    TrivialModule,
    TwistingCochain,
    check_mc,
)
from koszul.twisted import tensor_basis, tensor_basis_count, twisted_hom, twisted_tensor, twisted_tensor_two_sided
from lie.algebra import abelian, builtin_lie
from lie.chevalley_eilenberg import ce_coalgebra
from services.catalog import sphere_minimal


def cofree(letter_degree, length=3, K=QQ):
    words = ["a" * k for k in range(1, length + 1)]
    coproduct = {w: {(w[:i], w[i:]): K.one for i in range(1, len(w))} for w in words}
    return DGCoalgebra({w: letter_degree * len(w) for w in words}, coproduct, {}, K, name="T^c(a)")


def test_cobar_of_cofree_coalgebra_is_square_zero_extension():
    Om = CobarAlgebra(cofree(2), 3)
    Om.as_complex().check_square_zero()
    table = homology(Om.as_complex((-1, 4)), (0, 3))
    # Omega of a cofree coalgebra is k + s^-1 V with zero product
    assert table.betti() == (1, 1, 0, 0)
    assert 0 in table.trusted_degrees()


def test_cobar_word_differential():
    C = cofree(2)
    Om = CobarAlgebra(C, 3)
    assert Om.degree(("aa",)) == 3
    assert Om.weight(("a", "aa")) == 3
    assert Om.mul(("a",), ("aaa",)) == {}
    # d[aa] = -(-1)^{|a|} [a|a] with |a| = 2
    assert Om.d(("aa",)) == {("a", "a"): -QQ.one}


def test_pbw_for_abelian_lie_algebra():
    # H_0 of the cobar of C_*(g) is U(g); for k^2 it is k[x, y], of dimension 10 in weight <= 3
    C = ce_coalgebra(abelian(2, QQ))
    Om = CobarAlgebra(C, 3)
    table = homology(Om.as_complex((0, 1)), (0, 0))
    assert table.rank(0) == 10


@pytest.mark.parametrize("name,dim", [("heisenberg", 20), ("aff1", 10)])
def test_pbw_for_nonabelian_lie_algebras(name, dim):
    # U(g) has the size of S(g): filtration <= 3 of a 3- resp. 2-dimensional g
    Om = CobarAlgebra(ce_coalgebra(builtin_lie(name, QQ)), 3)
    assert homology(Om.as_complex((0, 1)), (0, 0)).rank(0) == dim


def test_loop_space_homology_of_sphere():
    # cobar of the minimal S^2 model is k[x] with |x| = 1
    Om = CobarAlgebra(sphere_minimal(QQ), 5)
    table = homology(Om.as_complex((-1, 5)), (0, 4))
    assert table.betti() == (1, 1, 1, 1, 1)
    assert table.trusted_degrees() == [0, 1, 2, 3, 4]


def test_universal_tau_on_lie_coalgebra():
    C = ce_coalgebra(abelian(2, QQ))
    assert check_mc(universal_tau(C, 3))


def test_bar_of_dual_numbers():
    A = DGAlgebra({"x": 0}, {}, {}, QQ, name="k[x]/x^2")
    B = bar(A, 3)
    assert B.verify()
    assert check_mc(bar_tau(B, A))
    table = homology(B.as_complex(), (0, 3))
    assert table.betti() == (1, 1, 1, 1)


def test_bar_differential_uses_product():
    # k[x]/x^3 with |x| = 0: d[x|x] = -(-1)^1 [x^2] = [x^2]
    A = DGAlgebra({"x": 0, "xx": 0}, {("x", "x"): {"xx": QQ.one}}, {}, QQ, name="k[x]/x^3")
    B = bar(A, 2)
    assert B.d(("x", "x")) == {("xx",): QQ.one}
    assert B.verify()


def test_counit_resolution_of_ground_field():
    C = cofree(2)
    k = TrivialModule(CobarAlgebra(C, None))
    f, quasi_iso = counit_resolution(C, k, 3, (0, 2))
    assert quasi_iso
    assert quasi_iso.definitive
    assert quasi_iso.window == (0, 2)
    assert f.degree == 0


def test_counit_resolution_refuses_untrusted_window():
    C = cofree(2)
    k = TrivialModule(CobarAlgebra(C, None))
    with pytest.raises(WindowNotTrusted) as err:
        counit_resolution(C, k, 3, (0, 5))
    assert 5 in err.value.context["untrusted"]


def test_bar_needs_an_augmented_algebra():
    # x^2 = 1 has no augmentation
    A = DGAlgebra({"x": 0}, {("x", "x"): {ONE: QQ.one}}, {}, QQ, name="k[x]/(x^2-1)")
    assert not A.augmented
    with pytest.raises(NotAugmented):
        bar(A, 2)


def test_word_reversal_sign():
    parity, rw = reverse_word(("a", "b"), lambda c: 1)
    assert rw == ("b", "a")
    assert parity == 1
    assert reverse_word(ONE, lambda c: 0) == (0, ())


def test_opposite_reversal_is_chain_and_algebra_map():
    assert opposite_reversal_failures(cofree(1), 3) == []
    assert opposite_reversal_failures(cofree(2), 3) == []
    assert opposite_reversal_failures(ce_coalgebra(abelian(2, QQ)), 3) == []


# ── twisted tensor products ──


def test_twisted_products_square_to_zero():
    C = cofree(2)
    tau = universal_tau(C)
    E = DGComodule.regular(C)
    twisted_tensor("left", E, tau, RegularModule(tau.target), 3, (0, 3)).check_square_zero()
    twisted_tensor("right", E, tau, RegularModule(tau.target), 3, (0, 3)).check_square_zero()
    twisted_tensor_two_sided(E, tau, 3, (0, 3)).check_square_zero()
    twisted_hom(E, E, tau, 3, (-3, 3)).check_square_zero()


def test_twisted_tensor_needs_matching_coaction():
    C = cofree(2)
    tau = universal_tau(C)
    right_only = DGComodule(C, {"m": 0}, {}, right={"m": {}}, name="m")
    with pytest.raises(GradingMismatch):
        twisted_tensor("right", right_only, tau, TrivialModule(tau.target), 2, (0, 2))
    with pytest.raises(GradingMismatch):
        twisted_hom(right_only, right_only, tau, 2, (0, 2))
    with pytest.raises(GradingMismatch):
        twisted_tensor("middle", right_only, tau, TrivialModule(tau.target), 2, (0, 2))


def test_twisted_products_reject_a_non_twisting_cochain():
    C = cofree(2)
    Om = CobarAlgebra(C, None)
    flipped = TwistingCochain(C, Om, lambda c: {(c,): -QQ.one}, name="-tau")
    assert not check_mc(flipped)
    E = DGComodule.regular(C)
    with pytest.raises(MaurerCartanViolated):
        twisted_tensor("left", E, flipped, RegularModule(Om), 3, (0, 3))
    with pytest.raises(MaurerCartanViolated):
        twisted_tensor_two_sided(E, flipped, 3, (0, 3))
    with pytest.raises(MaurerCartanViolated):
        twisted_hom(E, E, flipped, 3, (-3, 3))


def test_twisted_hom_needs_finite_rank_source():
    A = DGAlgebra({"x": 0}, {}, {}, QQ, name="k[x]/x^2")
    B = bar(A, 3)
    assert B.is_truncation
    E = DGComodule.regular(B)
    assert not E.finite_rank
    with pytest.raises(InfiniteRankSource):
        twisted_hom(E, E, universal_tau(B), 2, (0, 2))


def test_basis_count_matches_enumeration():
    C = cofree(2)
    Om = CobarAlgebra(C, None)
    factors = (RegularModule(Om), DGComodule.regular(C), TrivialModule(Om))
    basis = tensor_basis(factors, 3, (-100, 100))
    assert tensor_basis_count(factors, 3) == sum(len(labels) for labels in basis.values())
