"""
SparseMatrix - sparse matrices over a sympy domain.

A thin wrapper around a sparse-format `DomainMatrix` (SDM storage,
{row: {col: nonzero value}}). Indices are validated here so shape errors
surface as DimensionMismatch; arithmetic and elimination are sympy's.
Vectors are plain {index: value} dicts.
"""

from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple

from sympy.polys.matrices import DomainMatrix

from exceptions import DimensionMismatch
from linalg.domains import require_same

Vector = Dict[int, Any]


def vec_axpy(target: Vector, coeff, source: Vector) -> Vector:
    """target += coeff * source, in place, dropping zeros."""
    if not coeff:
        return target
    for k, v in source.items():
        cur = target.get(k)
        nv = coeff * v if cur is None else cur + coeff * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)
    return target


class SparseMatrix:
    """
    Immutable-by-convention sparse matrix.

    Parameters:
        rows:   {row index: {col index: value}}; zeros are dropped
        shape:  (n_rows, n_cols)
        domain: sympy domain of the entries
    """

    __slots__ = ("dm",)

    def __init__(self, rows: Dict[int, Dict[int, Any]], shape: Tuple[int, int], domain):
        m, n = shape
        clean: Dict[int, Dict[int, Any]] = {}
        for i, row in rows.items():
            if not 0 <= i < m:
                raise DimensionMismatch("Row index out of range", {"row": i, "n_rows": m})
            kept = {}
            for j, v in row.items():
                if not 0 <= j < n:
                    raise DimensionMismatch("Column index out of range", {"col": j, "n_cols": n})
                if v:
                    kept[j] = v
            if kept:
                clean[i] = kept
        self.dm = DomainMatrix(clean, (m, n), domain, fmt="sparse")

    @classmethod
    def wrap(cls, dm: DomainMatrix) -> "SparseMatrix":
        """Adopt a DomainMatrix result without re-validating it."""
        obj = cls.__new__(cls)
        obj.dm = dm.to_sparse()
        return obj

    # ── Constructors ──

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int, domain) -> "SparseMatrix":
        return cls.wrap(DomainMatrix.zeros((n_rows, n_cols), domain))

    @classmethod
    def identity(cls, n: int, domain) -> "SparseMatrix":
        return cls.wrap(DomainMatrix.eye(n, domain))

    @classmethod
    def from_entries(cls, entries: Dict[Tuple[int, int], Any], shape, domain) -> "SparseMatrix":
        rows: Dict[int, Dict[int, Any]] = {}
        for (i, j), v in entries.items():
            rows.setdefault(i, {})[j] = v
        return cls(rows, shape, domain)

    @classmethod
    def from_dense(cls, data: List[List[Any]], domain, n_cols: Optional[int] = None) -> "SparseMatrix":
        m = len(data)
        n = n_cols if n_cols is not None else (len(data[0]) if data else 0)
        rows = {}
        for i, line in enumerate(data):
            if len(line) != n:
                raise DimensionMismatch("Ragged dense matrix", {"row": i})
            rows[i] = {j: domain.convert(v) for j, v in enumerate(line) if v}
        return cls(rows, (m, n), domain)

    @classmethod
    def from_columns(cls, columns: List[Vector], n_rows: int, domain) -> "SparseMatrix":
        rows: Dict[int, Dict[int, Any]] = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                rows.setdefault(i, {})[j] = v
        return cls(rows, (n_rows, len(columns)), domain)

    # ── Accessors ──

    @property
    def rows(self) -> Dict[int, Dict[int, Any]]:
        return self.dm.rep

    @property
    def shape(self) -> Tuple[int, int]:
        return self.dm.shape

    @property
    def domain(self):
        return self.dm.domain

    @property
    def n_rows(self) -> int:
        return self.shape[0]

    @property
    def n_cols(self) -> int:
        return self.shape[1]

    @property
    def nnz(self) -> int:
        return self.dm.nnz()

    def get(self, i: int, j: int):
        return self.rows.get(i, {}).get(j, self.domain.zero)

    def entries(self) -> Iterator[Tuple[int, int, Any]]:
        rows = self.rows
        for i in sorted(rows):
            row = rows[i]
            for j in sorted(row):
                yield i, j, row[j]

    def column(self, j: int) -> Vector:
        return {i: row[j] for i, row in self.rows.items() if j in row}

    def columns(self) -> List[Vector]:
        cols: List[Vector] = [{} for _ in range(self.n_cols)]
        for i, row in self.rows.items():
            for j, v in row.items():
                cols[j][i] = v
        return cols

    def is_zero(self) -> bool:
        return not self.rows

    def to_dense(self) -> List[List[Any]]:
        return self.dm.to_list()

    # ── Arithmetic ──

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.wrap(self.dm.transpose())

    def apply(self, vec: Vector) -> Vector:
        """M @ vec for a sparse column vector."""
        if not vec or self.is_zero():
            return {}
        col = SparseMatrix({j: {0: v} for j, v in vec.items() if v}, (self.n_cols, 1), self.domain)
        out = self.dm.matmul(col.dm).to_sparse().rep
        return {i: row[0] for i, row in out.items()}

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        require_same(self.domain, other.domain)
        if self.n_cols != other.n_rows:
            raise DimensionMismatch("Inner dimensions differ", {"left": self.shape, "right": other.shape})
        return SparseMatrix.wrap(self.dm.matmul(other.dm))

    def _check_same(self, other: "SparseMatrix"):
        require_same(self.domain, other.domain)
        if self.shape != other.shape:
            raise DimensionMismatch("Shapes differ", {"left": self.shape, "right": other.shape})

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_same(other)
        return SparseMatrix.wrap(self.dm.add(other.dm))

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_same(other)
        return SparseMatrix.wrap(self.dm.sub(other.dm))

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix.wrap(self.dm.neg())

    def scale(self, c) -> "SparseMatrix":
        return SparseMatrix.wrap(self.dm.scalarmul(self.domain.convert(c)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.domain == other.domain and dict(self.rows) == dict(other.rows)

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return f"<SparseMatrix {self.n_rows}x{self.n_cols} nnz={self.nnz} over {self.domain}>"

    def submatrix(self, row_ids: Iterable[int], col_ids: Iterable[int]) -> "SparseMatrix":
        return SparseMatrix.wrap(self.dm.extract(list(row_ids), list(col_ids)))


def block_matrix(blocks: List[List[Optional[SparseMatrix]]], row_sizes: List[int],
                 col_sizes: List[int], domain) -> SparseMatrix:
    """Assemble a block matrix; None blocks are zero."""
    rows: Dict[int, Dict[int, Any]] = {}
    r_off = 0
    for bi, blocks_row in enumerate(blocks):
        c_off = 0
        for bj, blk in enumerate(blocks_row):
            if blk is not None:
                if blk.shape != (row_sizes[bi], col_sizes[bj]):
                    raise DimensionMismatch("Block shape mismatch", {"block": (bi, bj), "shape": blk.shape})
                require_same(domain, blk.domain)
                for i, row in blk.rows.items():
                    target = rows.setdefault(r_off + i, {})
                    for j, v in row.items():
                        target[c_off + j] = v
            c_off += col_sizes[bj]
        r_off += row_sizes[bi]
    return SparseMatrix(rows, (sum(row_sizes), sum(col_sizes)), domain)
