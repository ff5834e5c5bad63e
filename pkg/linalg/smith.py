"""
Smith normal form over ZZ.

Delegates to sympy's `smith_normal_decomp` and `invariant_factors`, which
run on a dense `DomainMatrix`. The decomposition follows sympy's
convention: S = P * M * Q with P, Q unimodular and S diagonal with
d1 | d2 | ... followed by zeros.
"""

import logging
from typing import List, Tuple

from sympy.polys.domains import ZZ
from sympy.polys.matrices.normalforms import invariant_factors, smith_normal_decomp

from exceptions import DomainMismatch
from linalg.sparse import SparseMatrix

logger = logging.getLogger(__name__)


def _require_integer(M: SparseMatrix, op: str):
    if M.domain != ZZ:
        raise DomainMismatch(f"{op} expects integer scalars", {"shape": M.shape})


def smith_normal_form(M: SparseMatrix) -> Tuple[SparseMatrix, SparseMatrix, SparseMatrix]:
    """
    Smith normal form of an integer matrix.

    Returns:
        (S, P, Q) with P, Q unimodular and S = P * M * Q
    """
    _require_integer(M, "smith_normal_form")
    S, P, Q = smith_normal_decomp(M.dm.to_dense())
    return SparseMatrix.wrap(S), SparseMatrix.wrap(P), SparseMatrix.wrap(Q)


def elementary_divisors(M: SparseMatrix) -> List[int]:
    """Nonzero diagonal of the Smith form, in divisibility order."""
    _require_integer(M, "elementary_divisors")
    if M.is_zero():
        return []
    return [abs(int(d)) for d in invariant_factors(M.dm.to_dense()) if d]
