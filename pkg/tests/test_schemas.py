"""Input documents and run configuration."""

import pytest
from pydantic import ValidationError
from sympy.polys.domains import QQ

from exceptions import SchemaError
from koszul.dgstruct import ONE
from models.schemas import FrobeniusDoc, LieAlgebraDoc, RunConfig, parse_document
from topology.reduction import reduce_by_tree
from topology.simplicial import torus7


def test_run_config_parses_window():
    cfg = RunConfig(scalar="fp:5", window="-1:2")
    assert cfg.window == (-1, 2)
    assert cfg.L == 4
    assert str(cfg.domain.mod) == "5"


@pytest.mark.parametrize("kwargs", [{"window": "2:1"}, {"window": "a:b"}, {"scalar": "r"}, {"N": 0}])
def test_run_config_rejects(kwargs):
    with pytest.raises(ValidationError):
        RunConfig(**kwargs)


def test_lie_document():
    doc = parse_document('{"kind": "lie_algebra", "basis": ["x", "y"],'
                         ' "brackets": [{"left": "x", "right": "y", "result": {"y": "1/2"}}]}')
    assert isinstance(doc, LieAlgebraDoc)
    g = doc.build(QQ)
    assert g.modular_character() == [QQ(1, 2), QQ.zero]


def test_coalgebra_document_with_beta():
    doc = parse_document("""{
        "kind": "dg_coalgebra",
        "basis": [{"name": "a", "degree": 1}, {"name": "b", "degree": 1}, {"name": "ab", "degree": 2}],
        "coproduct": {"ab": [{"left": "a", "right": "b"}, {"left": "b", "right": "a", "coeff": "-1"}]},
        "n": 2,
        "beta": [{"c": "ab"}, {"c": "1", "word": ["a", "b"], "coeff": "0"}]
    }""")
    C = doc.build(QQ)
    assert C.verify()
    assert C.reduced_coproduct("ab") == {("a", "b"): QQ.one, ("b", "a"): -QQ.one}
    assert doc.build_beta(QQ) == {("ab", ()): QQ.one}


def test_unknown_label_reports_field():
    with pytest.raises(SchemaError) as info:
        parse_document('{"kind": "dg_coalgebra", "basis": [{"name": "a"}], "differential": {"a": {"z": "1"}}}')
    assert info.value.context["errors"] == 1


def test_frobenius_document():
    doc = parse_document('{"kind": "frobenius", "algebra": {"basis": [{"name": "x"}]}, "trace": {"x": 1}}')
    assert isinstance(doc, FrobeniusDoc)
    F = doc.build(QQ)
    assert F.trace == {"x": QQ.one}
    with pytest.raises(SchemaError):
        parse_document('{"kind": "frobenius", "algebra": {"basis": [{"name": "x"}]}, "trace": {"y": 1}}')
    unit = parse_document('{"kind": "frobenius", "algebra": {"basis": []}, "trace": {"1": 1}}').build(QQ)
    assert ONE in unit.trace


def test_algebra_document_may_reach_the_unit():
    doc = parse_document('{"kind": "dg_algebra", "basis": [{"name": "x"}],'
                         ' "product": [{"left": "x", "right": "x", "result": {"1": "1"}}]}')
    A = doc.build(QQ)
    assert A.mul("x", "x") == {ONE: QQ.one}
    assert not A.augmented
    with pytest.raises(SchemaError):
        parse_document('{"kind": "dg_algebra", "basis": [{"name": "1"}]}')


def test_local_system_document():
    M = reduce_by_tree(torus7(), 0, QQ)
    edge = M.non_tree_edges()[0]
    text = ('{"kind": "local_system", "space": "torus7", "rank": 2, "transports": '
            '[{"edge": [%d, %d], "matrix": [["1", "0"], ["0", "1"]]}]}' % edge)
    ell = parse_document(text).build(M, QQ)
    assert ell.rank == 2
    assert ell.is_trivial()
    with pytest.raises(SchemaError):
        parse_document('{"kind": "local_system", "space": "torus7", "rank": 2,'
                       ' "transports": [{"edge": [0, 1], "matrix": [["1"]]}]}')
