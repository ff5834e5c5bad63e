"""
Verdict reports with replayable witnesses.

Every matrix identity a verifier relied on is stored with its matrices, so
`replay` can check the report without rebuilding any construction.
Scalars are serialized as exact [numerator, denominator] pairs.
"""

import enum
import json
import logging
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field
from sympy.polys.domains import ZZ

from exceptions import ReplayFailed
from linalg.domains import from_pair, parse_domain, sign, to_pair
from linalg.elimination import rank
from linalg.smith import elementary_divisors
from linalg.sparse import SparseMatrix

logger = logging.getLogger(__name__)


class Verdict(str, enum.Enum):
    VERIFIED = "VERIFIED"
    VERIFIED_FILTERED = "VERIFIED_FILTERED"
    FAILED = "FAILED"


class IdentityKind(str, enum.Enum):
    CHAIN_MAP = "chain_map"  # d_T f_n = (-1)^k f_{n-1} d_S
    SQUARE_ZERO = "square_zero"  # d_{n-1} d_n = 0
    LIFT = "lift"  # b x_{i+1} = -B x_i
    INVERTIBLE = "invertible"  # square matrix of full rank


# ── Matrices ────────────────────────────────────────────────────


class MatrixWitness(BaseModel):
    shape: Tuple[int, int]
    entries: List[Tuple[int, int, Tuple[int, int]]] = Field(default_factory=list)

    @classmethod
    def of(cls, M: SparseMatrix) -> "MatrixWitness":
        K = M.domain
        entries = sorted((i, j, to_pair(K, v)) for i, j, v in M.entries())
        return cls(shape=M.shape, entries=entries)

    def to_matrix(self, domain) -> SparseMatrix:
        rows: Dict[int, Dict[int, Any]] = {}
        for i, j, pair in self.entries:
            rows.setdefault(i, {})[j] = from_pair(domain, pair)
        return SparseMatrix(rows, tuple(self.shape), domain)


def vector_witness(domain, vec: Dict[int, Any]) -> List[Tuple[int, Tuple[int, int]]]:
    return sorted((i, to_pair(domain, v)) for i, v in vec.items() if v)


def vector_from_witness(domain, items) -> Dict[int, Any]:
    return {int(i): from_pair(domain, pair) for i, pair in items}


class Identity(BaseModel):
    """One recorded matrix identity."""
    kind: IdentityKind
    label: str
    degree: int = 0
    matrices: Dict[str, MatrixWitness] = Field(default_factory=dict)
    vectors: Dict[str, List[Tuple[int, Tuple[int, int]]]] = Field(default_factory=dict)


# ── Report ──────────────────────────────────────────────────────


class Obstruction(BaseModel):
    """
    Where a check fails.

    `ranks` are the two ranks compared, or (rank of H, 0) for a lift
    obstruction, whose class is then given by a representative cycle and
    its coordinates in the homology basis.
    """
    degree: int
    ranks: Tuple[int, int]
    reason: str = ""
    representative: Optional[List[Tuple[str, Tuple[int, int]]]] = None
    coordinates: Optional[List[Tuple[int, int]]] = None


class CYReport(BaseModel):
    """
    Outcome of a Calabi-Yau check.

    VERIFIED needs every trusted-window check and the lift; VERIFIED_FILTERED
    means every filtered-level check passed but some degree of the window
    was never trusted.
    """
    subject: str
    verdict: Verdict
    n: int
    scalar: str
    truncation: Dict[str, Any] = Field(default_factory=dict)
    checks: Dict[str, Any] = Field(default_factory=dict)
    obstruction: Optional[Obstruction] = None
    lift_obstruction: Optional[Obstruction] = None
    lift: Optional[List[List[Tuple[str, Tuple[int, int]]]]] = None
    witness: List[Identity] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    untrusted: List[int] = Field(default_factory=list)
    provenance: Dict[str, Any] = Field(default_factory=dict)
    timings: Optional[Dict[str, float]] = None

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.model_dump(mode="json", exclude_none=True), sort_keys=True, indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "CYReport":
        return cls.model_validate_json(text)


def label_text(label) -> str:
    """Stable text for a basis label (tuples, ints, strings, nested)."""
    if isinstance(label, tuple):
        return "(" + ",".join(label_text(x) for x in label) + ")"
    return str(label)


def lin_witness(domain, combo: Dict[Any, Any]) -> List[Tuple[str, Tuple[int, int]]]:
    return sorted((label_text(k), to_pair(domain, v)) for k, v in combo.items() if v)


# ── Witness builders ────────────────────────────────────────────


def chain_map_identities(f, label: str) -> List[Identity]:
    """One identity per source degree where f or d is nonzero."""
    out = []
    degrees = sorted(set(f.source.degrees()) | {n + 1 for n in f.source.degrees()})
    for n in degrees:
        if f.source.dim(n) == 0:
            continue
        mats = {
            "d_target": MatrixWitness.of(f.target.d(n + f.degree)),
            "f": MatrixWitness.of(f.component(n)),
            "f_prev": MatrixWitness.of(f.component(n - 1)),
            "d_source": MatrixWitness.of(f.source.d(n)),
        }
        out.append(Identity(kind=IdentityKind.CHAIN_MAP, label=label, degree=f.degree, matrices=mats))
    return out


def square_zero_identities(C, label: str) -> List[Identity]:
    out = []
    for n in C.degrees():
        if C.dim(n - 1) and C.dim(n - 2):
            mats = {"d": MatrixWitness.of(C.d(n)), "d_prev": MatrixWitness.of(C.d(n - 1))}
            out.append(Identity(kind=IdentityKind.SQUARE_ZERO, label=f"{label}@{n}", degree=n, matrices=mats))
    return out


def lift_identities(mixed, lift, label: str) -> List[Identity]:
    """b x_{i+1} = -B x_i for each recorded stage."""
    C = mixed.complex
    K = mixed.domain
    out = []
    for i in range(len(lift.stages) - 1):
        n = lift.degree + 2 * i
        x = C.module.vector(n, lift.stages[i])
        y = C.module.vector(n + 2, lift.stages[i + 1]) if lift.stages[i + 1] else {}
        mats = {"b": MatrixWitness.of(C.d(n + 2)), "B": MatrixWitness.of(mixed.B_matrix(n))}
        vecs = {"x": vector_witness(K, x), "y": vector_witness(K, y)}
        out.append(Identity(kind=IdentityKind.LIFT, label=f"{label}[{i}]", degree=n, matrices=mats, vectors=vecs))
    return out


def invertible_identity(M: SparseMatrix, label: str, degree: int = 0) -> Identity:
    return Identity(kind=IdentityKind.INVERTIBLE, label=label, degree=degree, matrices={"m": MatrixWitness.of(M)})


# ── Replay ──────────────────────────────────────────────────────


def is_invertible(M: SparseMatrix) -> bool:
    if M.n_rows != M.n_cols:
        return False
    if M.domain == ZZ:
        divs = elementary_divisors(M)
        return len(divs) == M.n_rows and all(abs(int(v)) == 1 for v in divs)
    return rank(M) == M.n_rows


def _replay_one(ident: Identity, K) -> bool:
    m = {k: w.to_matrix(K) for k, w in ident.matrices.items()}
    if ident.kind == IdentityKind.CHAIN_MAP:
        left = m["d_target"] @ m["f"]
        right = (m["f_prev"] @ m["d_source"]).scale(sign(K, ident.degree))
        return (left - right).is_zero()
    if ident.kind == IdentityKind.SQUARE_ZERO:
        return (m["d_prev"] @ m["d"]).is_zero()
    if ident.kind == IdentityKind.LIFT:
        x = vector_from_witness(K, ident.vectors.get("x", []))
        y = vector_from_witness(K, ident.vectors.get("y", []))
        by = m["b"].apply(y)
        Bx = m["B"].apply(x)
        total = dict(by)
        for i, v in Bx.items():
            total[i] = total.get(i, K.zero) + v
        return not any(total.values())
    if ident.kind == IdentityKind.INVERTIBLE:
        return is_invertible(m["m"])
    return False


def replay(report: CYReport) -> int:
    """
    Re-verify every recorded identity.

    Returns the number of identities checked.

    Raises:
        ReplayFailed: on the first identity that does not hold
    """
    K = parse_domain(report.scalar)
    for ident in report.witness:
        if not _replay_one(ident, K):
            raise ReplayFailed("Recorded identity does not hold",
                               {"identity": ident.label, "kind": ident.kind.value, "degree": ident.degree})
    logger.info("replayed %d identities of %s", len(report.witness), report.subject)
    return len(report.witness)


__all__ = [
    "CYReport",
    "Identity",
    "IdentityKind",
    "MatrixWitness",
    "Obstruction",
    "Verdict",
    "chain_map_identities",
    "invertible_identity",
    "is_invertible",
    "label_text",
    "lift_identities",
    "lin_witness",
    "replay",
    "square_zero_identities",
]
