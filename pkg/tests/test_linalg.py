"""Exact linear algebra: domains, elimination, Smith normal form."""

import random

import pytest
from sympy import Matrix
from sympy.polys.domains import GF, QQ, ZZ

from exceptions import DimensionMismatch, DomainMismatch, IntegerRankRequest, SchemaError
from linalg.domains import parse_domain, scalar, sign, to_pair, to_text
from linalg.elimination import integer_rank, kernel_basis, rank, rref, solve, solve_many
from linalg.smith import elementary_divisors, smith_normal_form
from linalg.sparse import SparseMatrix, block_matrix


def dense(rows, K=QQ):
    return SparseMatrix.from_dense(rows, K)


def oracle_rank(M: SparseMatrix) -> int:
    return Matrix([[int(v) for v in row] for row in M.to_dense()]).rank()


# ── domains ──


@pytest.mark.parametrize("text,expected", [("q", QQ), ("Z", ZZ), ("fp:7", GF(7, symmetric=False))])
def test_parse_domain(text, expected):
    assert parse_domain(text) == expected


@pytest.mark.parametrize("text", ["fp:4", "fp:1", "fp:x", "r", ""])
def test_parse_domain_rejects(text):
    with pytest.raises(SchemaError):
        parse_domain(text)


def test_scalar_conversions():
    assert scalar(QQ, "-1/2") == QQ(-1, 2)
    assert to_pair(QQ, scalar(QQ, "6/4")) == (3, 2)
    assert to_text(GF(5, symmetric=False), scalar(GF(5, symmetric=False), "1/2")) == "3"
    with pytest.raises(SchemaError):
        scalar(ZZ, "1/2")
    with pytest.raises(SchemaError):
        scalar(GF(3, symmetric=False), "1/3")
    assert sign(QQ, 3) == -QQ.one


# ── sparse matrices ──


def test_sparse_arithmetic():
    A = dense([[1, 2], [0, 1]])
    B = dense([[0, 1], [1, 0]])
    assert (A @ B) == dense([[2, 1], [1, 0]])
    assert (A - A).is_zero()
    assert A.apply({1: QQ(1)}) == {0: QQ(2), 1: QQ(1)}
    assert A.transpose() == dense([[1, 0], [2, 1]])
    with pytest.raises(DimensionMismatch):
        A @ dense([[1, 2, 3]])
    with pytest.raises(DomainMismatch):
        A @ SparseMatrix.identity(2, ZZ)


def test_block_matrix_and_submatrix():
    I2 = SparseMatrix.identity(2, QQ)
    M = block_matrix([[I2, None], [None, I2.scale(QQ(3))]], [2, 2], [2, 2], QQ)
    assert M.get(3, 3) == QQ(3)
    assert M.submatrix([2, 3], [2, 3]) == I2.scale(QQ(3))


# ── elimination ──


def test_rank_kernel_solve():
    M = dense([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert rank(M) == 2
    kernel = kernel_basis(M)
    assert len(kernel) == 1
    assert M.apply(kernel[0]) == {}
    x = solve(M, [6, 12, 2])
    assert M.apply(x) == {0: QQ(6), 1: QQ(12), 2: QQ(2)}
    assert solve(M, [1, 0, 0]) is None


def test_rref_pivots():
    pivots, cols = rref(dense([[0, 2, 4], [0, 1, 3]]))
    assert cols == [1, 2]
    assert pivots[1] == {1: QQ(1)}


def test_solve_many_matches_solve():
    M = dense([[1, 1], [1, -1]])
    out = solve_many(M, [{0: QQ(2)}, {1: QQ(2)}])
    assert out == [solve(M, {0: QQ(2)}), solve(M, {1: QQ(2)})]


def test_rank_over_gf2_differs():
    rows = [[1, 1], [1, -1]]
    assert rank(dense(rows)) == 2
    assert rank(dense(rows, GF(2, symmetric=False))) == 1


def test_integer_rank_request():
    with pytest.raises(IntegerRankRequest):
        rank(dense([[2]], ZZ))
    assert integer_rank(dense([[2, 4], [1, 2]], ZZ)) == 1


def test_rank_against_sympy_oracle():
    rng = random.Random(7)
    for _ in range(25):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        rows = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
        assert rank(dense(rows)) == Matrix(rows).rank()


# ── Smith normal form ──


def test_smith_form_of_small_matrix():
    M = dense([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], ZZ)
    S, P, Q = smith_normal_form(M)
    assert P @ M @ Q == S
    assert [abs(int(S.get(t, t))) for t in range(3)] == [2, 6, 12]
    assert [abs(int(d)) for d in elementary_divisors(M)] == [2, 6, 12]


def test_smith_torsion_of_rp2_boundary():
    # boundary of the 2-cell of the CW projective plane: multiplication by 2
    assert elementary_divisors(dense([[2]], ZZ)) == [2]
    assert elementary_divisors(SparseMatrix.zeros(2, 2, ZZ)) == []


def test_smith_random_divisibility_and_unimodular():
    rng = random.Random(11)
    for _ in range(20):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        M = dense([[rng.randint(-5, 5) for _ in range(n)] for _ in range(m)], ZZ)
        S, P, Q = smith_normal_form(M)
        assert P @ M @ Q == S
        assert Matrix([[int(v) for v in r] for r in P.to_dense()]).det() in (1, -1)
        assert Matrix([[int(v) for v in r] for r in Q.to_dense()]).det() in (1, -1)
        divs = [abs(int(d)) for d in elementary_divisors(M)]
        assert all(b % a == 0 for a, b in zip(divs, divs[1:]))
        assert len(divs) == oracle_rank(M)


def test_smith_requires_integers():
    with pytest.raises(DomainMismatch):
        smith_normal_form(dense([[1]]))


def test_kernel_vectors_have_unit_free_coordinate():
    M = dense([[1, 2, 0, 1], [0, 0, 1, 1]])
    kernel = kernel_basis(M)
    assert kernel == [{0: QQ(-2), 1: QQ(1)}, {0: QQ(-1), 2: QQ(-1), 3: QQ(1)}]
    assert all(M.apply(v) == {} for v in kernel)
    assert kernel_basis(SparseMatrix.zeros(1, 2, QQ)) == [{0: QQ.one}, {1: QQ.one}]


def test_solve_many_flags_each_inconsistent_system():
    M = dense([[1, 0], [0, 0]])
    assert solve_many(M, [{1: QQ(1)}, {0: QQ(3), 1: QQ(2)}, {0: QQ(3)}]) == [None, None, {0: QQ(3)}]


def test_matrices_wrap_sympy_domain_matrices():
    M = dense([[1, 2], [3, 4]], GF(5, symmetric=False))
    assert M.dm.domain == GF(5, symmetric=False)
    assert M.dm.rep.fmt == "sparse"
    assert rank(M) == 2
