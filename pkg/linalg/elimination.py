"""
Exact elimination over fields: rank, kernel basis, linear solve.

Everything goes through sympy's `DomainMatrix.rref`, which picks
Gauss-Jordan or fraction-free elimination by domain and density. Kernels
are read off the reduced form with `nullspace_from_rref`; solutions come
from reducing the matrix augmented by the right-hand sides.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from exceptions import DimensionMismatch, IntegerRankRequest
from linalg.domains import is_field
from linalg.sparse import SparseMatrix, Vector

logger = logging.getLogger(__name__)

Row = Dict[int, Any]


def _require_field(M: SparseMatrix, op: str):
    if not is_field(M.domain):
        raise IntegerRankRequest(f"{op} needs field scalars; use smith_normal_form over ZZ",
                                 {"shape": M.shape})


def _reduced(dm: DomainMatrix) -> Tuple[DomainMatrix, List[int]]:
    R, pivots = dm.rref()
    return R.to_sparse(), list(pivots)


def rank(M: SparseMatrix) -> int:
    """
    Dimension of the column span of a matrix over QQ or GF(p).

    Raises:
        IntegerRankRequest: for ZZ matrices
    """
    _require_field(M, "rank")
    if M.is_zero():
        return 0
    return M.dm.rank()


def rref(M: SparseMatrix) -> Tuple[Dict[int, Row], List[int]]:
    """
    Reduced row echelon form.

    Returns:
        ({pivot column: normalized row}, sorted pivot columns)
    """
    _require_field(M, "rref")
    if M.is_zero():
        return {}, []
    R, cols = _reduced(M.dm)
    return {c: dict(R.rep.get(k, {})) for k, c in enumerate(cols)}, cols


def kernel_basis(M: SparseMatrix) -> List[Vector]:
    """
    Basis of the null space {v : M v = 0}, one vector per free column.

    Each vector has a 1 in its free column, so the list is independent and
    has n_cols - rank(M) members.
    """
    _require_field(M, "kernel_basis")
    K = M.domain
    if M.is_zero():
        return [{j: K.one} for j in range(M.n_cols)]
    R, cols = _reduced(M.dm)
    null = R.nullspace_from_rref(cols).to_sparse()
    return [dict(null.rep.get(k, {})) for k in range(null.shape[0])]


def _augmented(M: SparseMatrix, rhs_list: List[Vector]) -> SparseMatrix:
    n = M.n_cols
    rows = {i: dict(r) for i, r in M.rows.items()}
    for t, b in enumerate(rhs_list):
        for i, v in b.items():
            if v:
                rows.setdefault(i, {})[n + t] = v
    return SparseMatrix(rows, (M.n_rows, n + len(rhs_list)), M.domain)


def solve(M: SparseMatrix, b: Union[Vector, Sequence[Any]]) -> Optional[Vector]:
    """
    Solve M x = b exactly.

    Parameters:
        M: field matrix
        b: right-hand side, dense sequence of length n_rows or sparse dict

    Returns:
        a solution vector (free variables set to 0), or None when b is not
        in the column span.
    """
    _require_field(M, "solve")
    K = M.domain
    if isinstance(b, dict):
        if any(not 0 <= i < M.n_rows for i in b):
            raise DimensionMismatch("Right-hand side index out of range", {"n_rows": M.n_rows})
        rhs = {i: v for i, v in b.items() if v}
    else:
        if len(b) != M.n_rows:
            raise DimensionMismatch("Right-hand side length differs from row count",
                                    {"n_rows": M.n_rows, "len": len(b)})
        rhs = {i: K.convert(v) for i, v in enumerate(b) if v}
    if not rhs:
        return {}
    return solve_many(M, [rhs])[0]


def solve_many(M: SparseMatrix, rhs_list: List[Vector]) -> List[Optional[Vector]]:
    """Solve several right-hand sides with one reduction of [M | b_1 ... b_k]."""
    _require_field(M, "solve")
    n = M.n_cols
    if not rhs_list:
        return []
    A = _augmented(M, rhs_list)
    if A.is_zero():
        return [{} for _ in rhs_list]
    R, cols = _reduced(A.dm)
    # a row whose pivot lies in the right-hand block reads 0 = (its b-entries)
    inconsistent = {j - n for k, c in enumerate(cols) if c >= n for j in R.rep.get(k, {}) if j >= n}
    out: List[Optional[Vector]] = []
    for t in range(len(rhs_list)):
        if t in inconsistent:
            out.append(None)
            continue
        x: Vector = {}
        for k, c in enumerate(cols):
            if c >= n:
                break
            v = R.rep.get(k, {}).get(n + t)
            if v:
                x[c] = v
        out.append(x)
    return out


def integer_rank(M: SparseMatrix) -> int:
    """Rank over QQ of a ZZ matrix (the number of nonzero elementary divisors)."""
    if M.domain != ZZ:
        return rank(M)
    if M.is_zero():
        return 0
    return M.dm.to_field().rank()
