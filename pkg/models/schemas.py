"""
Input documents and run configuration.

Every input file is one JSON document whose `kind` selects the schema.
Scalars are strings ("3", "-1/2") so rationals survive exactly; they are
converted into the run's scalar domain only when the object is built.
"""

from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError, field_validator, model_validator

from exceptions import SchemaError
from koszul.dgstruct import ONE, DGAlgebra, DGCoalgebra
from lie.algebra import LieAlgebra
from linalg.domains import parse_domain, scalar
from linalg.sparse import SparseMatrix
from services.cy_verify import FrobeniusDatum
from topology.local_systems import from_edge_transports
from topology.simplicial import SimplicialComplex

ScalarText = Union[str, int]


def _scalars(domain, combo: Dict[str, ScalarText]) -> Dict[str, object]:
    return {k: scalar(domain, v) for k, v in combo.items()}


def _unit_scalars(domain, combo: Dict[str, ScalarText]) -> Dict[object, object]:
    """Like _scalars, reading "1" as the unit."""
    return {(ONE if k == "1" else k): scalar(domain, v) for k, v in combo.items()}


# ── Run configuration ───────────────────────────────────────────


class RunConfig(BaseModel):
    scalar: str = "q"
    L: int = Field(4, ge=1, description="weight cap on cobar/bar words")
    window: Tuple[int, int] = (0, 3)
    N: int = Field(3, ge=1, description="powers of u kept in negative cyclic chains")
    report: Optional[str] = None

    @field_validator("window", mode="before")
    @classmethod
    def parse_window(cls, v):
        if isinstance(v, str):
            try:
                lo, hi = v.split(":")
                return int(lo), int(hi)
            except ValueError:
                raise ValueError(f"window must look like lo:hi, got '{v}'")
        return v

    @field_validator("scalar")
    @classmethod
    def check_scalar(cls, v: str) -> str:
        try:
            parse_domain(v)
        except SchemaError as exc:
            raise ValueError(exc.message)
        return v

    @model_validator(mode="after")
    def check_window(self):
        if self.window[0] > self.window[1]:
            raise ValueError(f"window lo {self.window[0]} exceeds hi {self.window[1]}")
        return self

    @property
    def domain(self):
        return parse_domain(self.scalar)


# ── Shared pieces ───────────────────────────────────────────────


class BasisElement(BaseModel):
    name: str
    degree: int = 0


class CoproductTerm(BaseModel):
    left: str
    right: str
    coeff: ScalarText = "1"


class ProductEntry(BaseModel):
    left: str
    right: str
    result: Dict[str, ScalarText]


class BetaTerm(BaseModel):
    """One term c (x) [w_1 | ... | w_k] of a coHochschild chain; c = "1" for ONE."""
    c: str
    word: List[str] = Field(default_factory=list)
    coeff: ScalarText = "1"


def _check_names(basis: List[BasisElement], *mentioned: str):
    names = {b.name for b in basis}
    if len(names) != len(basis):
        raise ValueError("basis names must be distinct")
    for m in mentioned:
        if m not in names:
            raise ValueError(f"'{m}' is not a basis element")


# ── Documents ───────────────────────────────────────────────────


class LieAlgebraDoc(BaseModel):
    kind: Literal["lie_algebra"]
    name: str = "g"
    basis: List[str]
    brackets: List[ProductEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_indices(self):
        names = set(self.basis)
        for entry in self.brackets:
            for m in [entry.left, entry.right, *entry.result]:
                if m not in names:
                    raise ValueError(f"'{m}' is not a basis element")
        return self

    def build(self, domain):
        index = {name: i for i, name in enumerate(self.basis)}
        brackets = {}
        for entry in self.brackets:
            brackets[(index[entry.left], index[entry.right])] = {
                index[k]: v for k, v in _scalars(domain, entry.result).items()}
        return LieAlgebra(self.basis, brackets, domain, name=self.name)


class SimplicialComplexDoc(BaseModel):
    kind: Literal["simplicial_complex"]
    name: str = "K"
    n_vertices: Optional[int] = None
    facets: List[List[int]]
    dimension: Optional[int] = None
    base_vertex: int = 0

    def build(self):
        n = self.n_vertices if self.n_vertices is not None else 1 + max((max(f) for f in self.facets if f), default=-1)
        return SimplicialComplex(n, self.facets, name=self.name)

    def cy_dimension(self) -> int:
        return self.dimension if self.dimension is not None else max(len(f) for f in self.facets) - 1


class DGCoalgebraDoc(BaseModel):
    kind: Literal["dg_coalgebra"]
    name: str = "C"
    basis: List[BasisElement]
    coproduct: Dict[str, List[CoproductTerm]] = Field(default_factory=dict)
    differential: Dict[str, Dict[str, ScalarText]] = Field(default_factory=dict)
    curvature: Dict[str, ScalarText] = Field(default_factory=dict)
    cocommutative: bool = False
    n: Optional[int] = None
    beta: List[BetaTerm] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_labels(self):
        mentioned = list(self.coproduct) + list(self.differential) + list(self.curvature)
        for terms in self.coproduct.values():
            mentioned += [t for term in terms for t in (term.left, term.right)]
        for lin in self.differential.values():
            mentioned += list(lin)
        for term in self.beta:
            mentioned += [x for x in [term.c, *term.word] if x != "1"]
        _check_names(self.basis, *mentioned)
        return self

    def build(self, domain):
        degrees = {b.name: b.degree for b in self.basis}
        coproduct = {}
        for c, terms in self.coproduct.items():
            lin = coproduct.setdefault(c, {})
            for t in terms:
                key = (t.left, t.right)
                lin[key] = lin.get(key, domain.zero) + scalar(domain, t.coeff)
        differential = {c: _scalars(domain, lin) for c, lin in self.differential.items()}
        return DGCoalgebra(degrees, coproduct, differential, domain,
                           curvature=_scalars(domain, self.curvature) or None,
                           cocommutative=self.cocommutative, name=self.name)

    def build_beta(self, domain) -> Dict:
        out: Dict = {}
        for t in self.beta:
            key = (ONE if t.c == "1" else t.c, tuple(t.word))
            out[key] = out.get(key, domain.zero) + scalar(domain, t.coeff)
        return {k: v for k, v in out.items() if v}


class AlgebraBody(BaseModel):
    name: str = "A"
    basis: List[BasisElement]
    product: List[ProductEntry] = Field(default_factory=list)
    differential: Dict[str, Dict[str, ScalarText]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_labels(self):
        if any(b.name == "1" for b in self.basis):
            raise ValueError("'1' names the unit and cannot be a basis element")
        mentioned = list(self.differential)
        for entry in self.product:
            mentioned += [entry.left, entry.right, *(r for r in entry.result if r != "1")]
        for lin in self.differential.values():
            mentioned += [t for t in lin if t != "1"]
        _check_names(self.basis, *mentioned)
        return self

    def build(self, domain):
        degrees = {b.name: b.degree for b in self.basis}
        product = {(e.left, e.right): _unit_scalars(domain, e.result) for e in self.product}
        differential = {a: _unit_scalars(domain, lin) for a, lin in self.differential.items()}
        return DGAlgebra(degrees, product, differential, domain, name=self.name)


class DGAlgebraDoc(AlgebraBody):
    kind: Literal["dg_algebra"]


class FrobeniusDoc(BaseModel):
    kind: Literal["frobenius"]
    name: str = ""
    algebra: AlgebraBody
    trace: Dict[str, ScalarText]
    n: int = 0

    @model_validator(mode="after")
    def check_trace(self):
        names = {b.name for b in self.algebra.basis} | {"1"}
        for k in self.trace:
            if k not in names:
                raise ValueError(f"trace on unknown element '{k}'")
        return self

    def build(self, domain):
        A = self.algebra.build(domain)
        trace = {(ONE if k == "1" else k): scalar(domain, v) for k, v in self.trace.items()}
        return FrobeniusDatum(A, trace, name=self.name or A.name)


class TransportEntry(BaseModel):
    edge: Tuple[int, int]
    matrix: List[List[ScalarText]]


class LocalSystemDoc(BaseModel):
    kind: Literal["local_system"]
    name: str = ""
    space: Union[str, SimplicialComplexDoc] = Field(description="built-in name or an inline complex")
    rank: int = Field(1, ge=1)
    transports: List[TransportEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_shapes(self):
        for t in self.transports:
            if len(t.matrix) != self.rank or any(len(row) != self.rank for row in t.matrix):
                raise ValueError(f"transport on {t.edge} is not {self.rank}x{self.rank}")
        return self

    def build(self, model, domain):
        mats = {}
        for t in self.transports:
            rows = [[scalar(domain, v) for v in row] for row in t.matrix]
            mats[tuple(sorted(t.edge))] = SparseMatrix.from_dense(rows, domain)
        return from_edge_transports(model, self.rank, mats, domain, name=self.name or f"rank{self.rank}")


InputDocument = Annotated[
    Union[LieAlgebraDoc, SimplicialComplexDoc, DGCoalgebraDoc, DGAlgebraDoc, LocalSystemDoc, FrobeniusDoc],
    Field(discriminator="kind"),
]

_adapter = TypeAdapter(InputDocument)


def _loc(err) -> str:
    return ".".join(str(x) for x in err.get("loc", ())) or "<document>"


def parse_document(text: str):
    """
    Raises:
        SchemaError: with the field path of the first violation
    """
    try:
        return _adapter.validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise SchemaError(f"Invalid input document: {first.get('msg', 'validation error')}",
                          {"field": _loc(first), "errors": exc.error_count()}) from exc


def load_document(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"Cannot read input file: {exc.strerror}", {"path": path}) from exc
    return parse_document(text)


__all__ = [
    "DGAlgebraDoc",
    "DGCoalgebraDoc",
    "FrobeniusDoc",
    "InputDocument",
    "LieAlgebraDoc",
    "LocalSystemDoc",
    "RunConfig",
    "SimplicialComplexDoc",
    "load_document",
    "parse_document",
]
