"""Calabi-Yau verdicts on Frobenius algebras, Lie coalgebras and recorded witnesses."""

import pytest
from sympy.polys.domains import QQ, ZZ

from exceptions import DegenerateTrace, DomainMismatch, GradingMismatch, InfiniteRank, ReplayFailed
from koszul.barcobar import CobarAlgebra
from koszul.dgstruct import ONE, DGComodule
from lie.algebra import builtin_lie
from lie.chevalley_eilenberg import ce_coalgebra, pd_class_cochain, pd_formula, theta
from models.report import CYReport, Verdict, replay
from services import catalog
from services.cy_verify import (
    StrictCertificate,
    check_proper_cy,
    dual_comodule,
    phi_of_cycle,
    proper_cy_algebra,
    rank_obstruction,
    smooth_cy_on_bar,
)
from services.lie_service import check_lie_cy


# ── finite algebras ──


def test_dual_numbers_are_proper_cy():
    report = proper_cy_algebra(catalog.dual_numbers(QQ), 0)
    assert report.verdict == Verdict.VERIFIED
    assert report.checks["nondegenerate"]
    assert report.checks["symmetric"]
    assert replay(report) == len(report.witness)


def test_ground_field_is_proper_cy():
    assert proper_cy_algebra(catalog.ground_field(QQ), 0).verdict == Verdict.VERIFIED


def test_degenerate_trace():
    F = catalog.dual_numbers(QQ, degenerate=True)
    report = proper_cy_algebra(F, 0)
    assert report.verdict == Verdict.FAILED
    assert report.obstruction.reason == "degenerate pairing"
    assert report.checks["pairing_rank"] == 1
    with pytest.raises(DegenerateTrace):
        smooth_cy_on_bar(F, 0, 3, (0, 2))


def test_trace_degree_must_match():
    with pytest.raises(GradingMismatch):
        proper_cy_algebra(catalog.dual_numbers(QQ), 1)


def test_integer_scalars_rejected():
    with pytest.raises(DomainMismatch):
        proper_cy_algebra(catalog.dual_numbers(ZZ), 0)


def test_dual_numbers_smooth_cy_on_bar():
    report = smooth_cy_on_bar(catalog.dual_numbers(QQ), 0, 3, (0, 2))
    assert report.verdict != Verdict.FAILED
    assert report.checks["proper"] == "VERIFIED"
    assert report.checks["cone"]["trusted_failures"] == []


# ── Lie coalgebras ──


def test_unimodular_lie_algebra_has_no_rank_obstruction():
    assert rank_obstruction(ce_coalgebra(builtin_lie("heisenberg", QQ)), 3) is None


def test_heisenberg_verified():
    report = check_lie_cy(builtin_lie("heisenberg", QQ), 4, (0, 3), 3)
    assert report.verdict == Verdict.VERIFIED
    assert report.checks["unimodular"]
    assert report.checks["one_sided"]["passed"]
    assert report.witness


def test_sl2_verified_on_the_strict_certificate():
    report = check_lie_cy(builtin_lie("sl2", QQ), 4, (0, 3), 3)
    assert report.verdict == Verdict.VERIFIED
    assert report.checks["unimodular"]
    assert "strict_certificate" in report.provenance["verified_by"]
    assert report.provenance["two_sided_level"] in (None, 0, 1)
    assert report.provenance["trusted_degrees"] == []
    assert "strict certificate" in report.provenance["note"]


@pytest.mark.parametrize("c", [QQ(2), QQ(-1), QQ(1, 3)])
def test_verdict_invariant_under_scaling_theta(c):
    g = builtin_lie("heisenberg", QQ)
    th = theta(g)
    C = ce_coalgebra(g)
    beta = {(th, ONE): c}
    certificate = StrictCertificate(pd_formula(g, th, scale=c), name="scaled")
    report = check_proper_cy(C, beta, 3, 4, (0, 3), 3, certificate=certificate)
    assert report.verdict == Verdict.VERIFIED
    assert report.lift_obstruction is None


def test_aff1_obstructed_in_top_degree():
    report = check_lie_cy(builtin_lie("aff1", QQ), 4, (0, 2), 3)
    assert report.verdict == Verdict.FAILED
    assert report.obstruction.degree == 2
    assert not report.checks["unimodular"]
    assert report.checks["modular_character"] != ["0", "0"]


# ── witnesses ──


def test_report_round_trip_and_tampering():
    report = proper_cy_algebra(catalog.dual_numbers(QQ), 0)
    again = CYReport.from_json(report.to_json())
    assert replay(again) == len(report.witness)

    pairing = again.witness[0]
    assert pairing.kind.value == "invertible"
    pairing.matrices["m"].entries = []
    with pytest.raises(ReplayFailed):
        replay(again)


# ── building blocks ──


def test_dual_comodule_of_regular_comodule():
    C = ce_coalgebra(builtin_lie("heisenberg", QQ))
    reg = DGComodule.regular(C)
    D = dual_comodule(reg)
    assert D.finite_rank
    assert D.rank == len(reg.labels)
    with pytest.raises(InfiniteRank):
        dual_comodule(CobarAlgebra(C, None))


def test_phi_of_pd_class_is_chain_map():
    g = builtin_lie("heisenberg", QQ)
    C = ce_coalgebra(g)
    beta = pd_class_cochain(g, cap=3, window=(0, 3)).chain
    f = phi_of_cycle(beta, C, 3, 0, (0, 3))
    assert f.degree == 3
    assert f.failures() == []


def test_check_proper_cy_stops_at_rank_obstruction():
    C = ce_coalgebra(builtin_lie("aff1", QQ))
    report = check_proper_cy(C, {}, 2, 3, (0, 2), 2)
    assert report.verdict == Verdict.FAILED
    assert report.checks["rank_comparison"] is False
    assert report.obstruction.degree == 2
    assert report.lift is None
