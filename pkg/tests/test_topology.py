"""Triangulated spaces: homology, pi1, local systems and Poincare duality."""

import pytest
from sympy.polys.domains import GF, QQ, ZZ

from exceptions import Disconnected, NotOrientable, NotPure, RelationViolated, SchemaError
from homology.complexes import homology, is_quasi_iso
from models.report import Verdict
from services import catalog
from services.space_service import check_space_cy, space_betti, space_pi1, transport_cycle
from topology.duality import cap_with, check_pd, twisted_complexes
from topology.fundamental_group import pi1_presentation, pi1_summary
from topology.local_systems import regular_representation, sign_system, torus_sign_system, trivial
from topology.reduction import chains_coalgebra, reduce_by_tree
from topology.simplicial import (
    SimplicialComplex,
    barycentric_subdivision,
    circle,
    fundamental_cycle,
    rp2_min,
    sphere2,
    stellar_subdivision,
    torus7,
)

F2 = GF(2, symmetric=False)


# ── homology ──


@pytest.mark.parametrize("K,betti,euler", [
    (sphere2(), (1, 0, 1), 2),
    (torus7(), (1, 2, 1), 0),
    (rp2_min(), (1, 0, 0), 1),
    (circle(5), (1, 1), 0),
])
def test_rational_betti_numbers(K, betti, euler):
    assert space_betti(K, QQ).betti() == betti
    assert K.euler_characteristic() == euler


def test_projective_plane_torsion():
    table = space_betti(rp2_min(), ZZ)
    assert table.groups[1].torsion == [2]
    assert table.rank(2) == 0
    assert space_betti(rp2_min(), F2).betti() == (1, 1, 1)


def test_subdivisions_preserve_homology():
    assert space_betti(stellar_subdivision(sphere2()), QQ).betti() == (1, 0, 1)
    sd = barycentric_subdivision(circle(3))
    assert sd.n_vertices == 6
    assert space_betti(sd, QQ).betti() == (1, 1)
    assert torus7().f_vector() == (7, 21, 14)


def test_stellar_subdivision_needs_a_facet():
    with pytest.raises(SchemaError):
        stellar_subdivision(sphere2(), (0, 1))


# ── fundamental cycles ──


def test_fundamental_cycles():
    alpha = fundamental_cycle(torus7(), 2, QQ)
    assert alpha.is_cycle()
    assert len(alpha.chain) == 14
    with pytest.raises(NotOrientable):
        fundamental_cycle(rp2_min(), 2, QQ)
    assert fundamental_cycle(rp2_min(), 2, F2).is_cycle()
    with pytest.raises(NotPure):
        fundamental_cycle(sphere2(), 1, QQ)


# ── tree reduction and pi1 ──


def test_tree_reduction():
    M = reduce_by_tree(sphere2(), 0, QQ)
    assert M.tree == frozenset({(0, 1), (0, 2), (0, 3)})
    assert M.non_tree_edges() == [(1, 2), (1, 3), (2, 3)]
    assert M.certificate["passed"]
    assert chains_coalgebra(M, QQ).verify()
    with pytest.raises(Disconnected):
        reduce_by_tree(SimplicialComplex(2, [(0,), (1,)]), 0, QQ)


def test_circle_presentation_is_free():
    P = pi1_presentation(reduce_by_tree(circle(3), 0, QQ))
    assert len(P.generators) == 1
    assert all(not word for word in P.relations)


def test_pi1_orders():
    assert space_pi1(sphere2(), 0, QQ).order == 1
    assert space_pi1(rp2_min(), 0, QQ).order == 2
    torus = pi1_summary(reduce_by_tree(torus7(), 0, QQ), limit=200)
    assert not torus.finite


# ── local systems ──


def test_non_flat_system_rejected():
    M = reduce_by_tree(sphere2(), 0, QQ)
    with pytest.raises(RelationViolated):
        sign_system(M, {(1, 2): -1}, QQ)


def test_torus_sign_system_kills_homology():
    M = reduce_by_tree(torus7(), 0, QQ)
    ell = torus_sign_system(M, QQ)
    assert not ell.is_trivial()
    cochains, chains = twisted_complexes(torus7(), M, ell)
    assert homology(chains, (0, 2)).is_zero()
    assert homology(cochains, (-2, 0)).is_zero()


def test_regular_representation_of_projective_plane():
    M = reduce_by_tree(rp2_min(), 0, F2)
    ell = regular_representation(M, F2)
    assert ell.rank == 2
    assert ell.relation_failures() == []


# ── Poincare duality ──


def test_sphere_duality_is_definitive():
    result = check_pd(sphere2(), fundamental_cycle(sphere2(), 2, QQ))
    assert result.passed
    assert result.definitive
    assert result.pi1_order == 1


def test_torus_duality_on_default_systems():
    K = torus7()
    M = reduce_by_tree(K, 0, QQ)
    systems = catalog.default_systems("torus7", M, QQ)
    result = check_pd(K, fundamental_cycle(K, 2, QQ), systems, M=M)
    assert result.passed
    assert not result.definitive
    assert [s.name for s in result.systems] == ["trivial", "torus(-1,1)"]


def test_projective_plane_duality_mod_two():
    K = rp2_min()
    result = check_pd(K, fundamental_cycle(K, 2, F2))
    assert result.passed
    assert result.definitive
    assert result.systems[-1].rank == 2


def test_wrong_multiple_of_fundamental_class_fails():
    K = sphere2()
    M = reduce_by_tree(K, 0, QQ)
    alpha = fundamental_cycle(K, 2, QQ).scaled(QQ.zero)
    result = check_pd(K, alpha, [trivial(M, QQ)], M=M)
    assert not result.passed


# ── bridge to the coalgebra check ──


def test_transported_cycle_is_cohochschild_cycle():
    K = sphere2()
    M = reduce_by_tree(K, 0, QQ)
    C = chains_coalgebra(M, QQ)
    transport = transport_cycle(C, M, fundamental_cycle(K, 2, QQ), 3)
    assert transport.found
    beta = transport.beta
    assert all(C.degree(c) <= 2 for c, _ in beta)


def test_transport_stops_at_the_weight_cap_or_basis_limit():
    K = torus7()
    M = reduce_by_tree(K, 0, QQ)
    C = chains_coalgebra(M, QQ)
    alpha = fundamental_cycle(K, 2, QQ)
    capped = transport_cycle(C, M, alpha, 2)
    assert not capped.found
    assert (capped.level, capped.stopped_by) == (2, "weight cap")
    limited = transport_cycle(C, M, alpha, 4, limit=1)
    assert not limited.found
    assert (limited.level, limited.stopped_by) == (2, "basis limit")


def test_torus_space_check_without_lift_is_filtered():
    K = torus7()
    report = check_space_cy(K, 0, fundamental_cycle(K, 2, QQ), 2, (0, 2), 2)
    assert report.verdict == Verdict.VERIFIED_FILTERED
    assert report.untrusted == [0, 1, 2]
    assert report.checks["poincare_duality"]["passed"]
    assert not report.checks["definitive"]
    assert any("no coHochschild lift" in note for note in report.notes)


def test_sphere_space_check():
    K = sphere2()
    report = check_space_cy(K, 0, fundamental_cycle(K, 2, QQ), 2, (0, 2), 2)
    assert report.verdict != Verdict.FAILED
    assert report.checks["poincare_duality"]["definitive"]
    assert report.checks["tree_certificate"]


@pytest.mark.parametrize("c", [QQ(2), QQ(-1)])
def test_space_verdict_invariant_under_scaling_alpha(c):
    K = sphere2()
    alpha = fundamental_cycle(K, 2, QQ)
    base = check_space_cy(K, 0, alpha, 2, (0, 2), 2)
    scaled = check_space_cy(K, 0, alpha.scaled(c), 2, (0, 2), 2)
    assert scaled.verdict == base.verdict
    assert scaled.untrusted == base.untrusted
    assert scaled.checks["poincare_duality"]["passed"]


def test_cap_with_fundamental_class_is_quasi_iso():
    K = sphere2()
    M = reduce_by_tree(K, 0, QQ)
    P = cap_with(fundamental_cycle(K, 2, QQ), trivial(M, QQ))
    assert P.degree == 2
    assert P.failures() == []
    assert is_quasi_iso(P, (0, 3))
