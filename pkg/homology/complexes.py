"""
Chain complexes over exact scalars.

Homological grading: the differential has degree -1 and d_n is stored as a
SparseMatrix from the degree-n basis to the degree-(n-1) basis. Basis labels
are opaque hashable tags (words, simplex tuples, tensor triples), so callers
never renumber.

Truncated complexes carry a completeness predicate: degree n is complete
when the truncation removed nothing in degree n. A homology degree is
trusted when degrees n-1, n and n+1 are all complete.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Tuple

from sympy.polys.domains import ZZ

from exceptions import DifferentialNotSquareZero, DimensionMismatch, GradingMismatch, NotAChainMap
from linalg.domains import sign
from linalg.elimination import kernel_basis, rank, rref, solve
from linalg.smith import elementary_divisors
from linalg.sparse import SparseMatrix, Vector, block_matrix

logger = logging.getLogger(__name__)

Label = Hashable
LinearCombination = Dict[Label, Any]
Window = Tuple[int, int]


def _always(_n: int) -> bool:
    return True


class GradedModule:
    """Finitely supported graded free module with ordered labelled bases."""

    def __init__(self, basis: Dict[int, List[Label]]):
        self.basis: Dict[int, List[Label]] = {n: list(b) for n, b in sorted(basis.items()) if b}
        self._index: Dict[int, Dict[Label, int]] = {}
        for n, labels in self.basis.items():
            idx = {lab: k for k, lab in enumerate(labels)}
            if len(idx) != len(labels):
                raise DimensionMismatch("Duplicate basis label", {"degree": n})
            self._index[n] = idx

    def degrees(self) -> List[int]:
        return list(self.basis)

    def dim(self, n: int) -> int:
        return len(self.basis.get(n, ()))

    def labels(self, n: int) -> List[Label]:
        return self.basis.get(n, [])

    def index(self, n: int) -> Dict[Label, int]:
        return self._index.get(n, {})

    def degree_of(self, label: Label) -> Optional[int]:
        for n, idx in self._index.items():
            if label in idx:
                return n
        return None

    def vector(self, n: int, combo: LinearCombination) -> Vector:
        """Coordinates of a linear combination of degree-n labels."""
        idx = self.index(n)
        out: Vector = {}
        for lab, c in combo.items():
            if not c:
                continue
            if lab not in idx:
                raise GradingMismatch("Label not in basis", {"degree": n, "label": repr(lab)})
            out[idx[lab]] = c
        return out

    def combination(self, n: int, vec: Vector) -> LinearCombination:
        labels = self.labels(n)
        return {labels[i]: v for i, v in vec.items() if v}

    def total_dim(self) -> int:
        return sum(len(b) for b in self.basis.values())


class ChainComplex:
    """
    Finitely supported chain complex.

    Parameters:
        module:       GradedModule with the bases
        differential: {n: SparseMatrix d_n of shape (dim_{n-1}, dim_n)}
        domain:       scalar domain
        complete:     predicate; False for degrees the truncation cut into
    """

    def __init__(self, module: GradedModule, differential: Dict[int, SparseMatrix], domain,
                 complete: Callable[[int], bool] = _always, name: str = ""):
        self.module = module
        self.domain = domain
        self.complete = complete
        self.name = name
        self.differential: Dict[int, SparseMatrix] = {}
        for n, mat in differential.items():
            expected = (module.dim(n - 1), module.dim(n))
            if mat.shape != expected:
                raise DimensionMismatch("Differential has wrong shape",
                                        {"degree": n, "shape": mat.shape, "expected": expected})
            if mat.domain != domain:
                raise DimensionMismatch("Differential over another domain", {"degree": n})
            if not mat.is_zero():
                self.differential[n] = mat

    @classmethod
    def from_operator(cls, basis: Dict[int, List[Label]], d: Callable[[Label], LinearCombination], domain,
                      complete: Callable[[int], bool] = _always, name: str = "") -> "ChainComplex":
        """
        Build the matrices of a differential given on basis labels.

        d(label) must land in the basis of the next lower degree whenever
        that degree is present; terms leaving the basis raise GradingMismatch.
        """
        module = GradedModule(basis)
        mats: Dict[int, SparseMatrix] = {}
        for n in module.degrees():
            if module.dim(n - 1) == 0:
                continue
            target = module.index(n - 1)
            rows: Dict[int, Dict[int, Any]] = {}
            for j, lab in enumerate(module.labels(n)):
                for tgt, c in d(lab).items():
                    if not c:
                        continue
                    i = target.get(tgt)
                    if i is None:
                        raise GradingMismatch("Differential leaves the basis",
                                              {"degree": n, "source": repr(lab), "target": repr(tgt)})
                    rows.setdefault(i, {})[j] = c
            mats[n] = SparseMatrix(rows, (module.dim(n - 1), module.dim(n)), domain)
        return cls(module, mats, domain, complete=complete, name=name)

    def d(self, n: int) -> SparseMatrix:
        mat = self.differential.get(n)
        if mat is None:
            return SparseMatrix.zeros(self.module.dim(n - 1), self.module.dim(n), self.domain)
        return mat

    def degrees(self) -> List[int]:
        return self.module.degrees()

    def dim(self, n: int) -> int:
        return self.module.dim(n)

    def trusted(self, n: int) -> bool:
        return self.complete(n - 1) and self.complete(n) and self.complete(n + 1)

    def square_zero_at(self, n: int) -> bool:
        """True when d_{n-1} o d_n vanishes."""
        if n not in self.differential or n - 1 not in self.differential:
            return True
        return (self.d(n - 1) @ self.d(n)).is_zero()

    def check_square_zero(self, degrees: Optional[Iterable[int]] = None):
        """
        Raise DifferentialNotSquareZero at the first degree n with d_{n-1} d_n != 0.

        Checks every stored differential unless `degrees` narrows the set.
        """
        todo = sorted(self.differential) if degrees is None else sorted(set(degrees))
        for n in todo:
            if not self.square_zero_at(n):
                raise DifferentialNotSquareZero("d o d != 0", {"degree": n, "complex": self.name})

    def is_cycle(self, n: int, vec: Vector) -> bool:
        return not self.d(n).apply(vec)

    def __repr__(self):
        dims = {n: self.dim(n) for n in self.degrees()}
        return f"<ChainComplex {self.name or ''} dims={dims}>"


class ChainMap:
    """
    Chain map f: source -> target of the given degree.

    components[n] maps source degree n to target degree n + degree. The
    identity d f = (-1)^degree f d is checked by `check`.
    """

    def __init__(self, source: ChainComplex, target: ChainComplex, degree: int,
                 components: Dict[int, SparseMatrix], name: str = ""):
        self.source = source
        self.target = target
        self.degree = degree
        self.name = name
        self.components: Dict[int, SparseMatrix] = {}
        for n, mat in components.items():
            expected = (target.dim(n + degree), source.dim(n))
            if mat.shape != expected:
                raise DimensionMismatch("Chain map component has wrong shape",
                                        {"degree": n, "shape": mat.shape, "expected": expected})
            self.components[n] = mat

    @classmethod
    def from_operator(cls, source: ChainComplex, target: ChainComplex, degree: int,
                      f: Callable[[Label], LinearCombination], name: str = "") -> "ChainMap":
        comps: Dict[int, SparseMatrix] = {}
        for n in source.degrees():
            tdeg = n + degree
            idx = target.module.index(tdeg)
            rows: Dict[int, Dict[int, Any]] = {}
            for j, lab in enumerate(source.module.labels(n)):
                for tgt, c in f(lab).items():
                    if not c:
                        continue
                    i = idx.get(tgt)
                    if i is None:
                        raise GradingMismatch("Map leaves the target basis",
                                              {"degree": n, "source": repr(lab), "target": repr(tgt)})
                    rows.setdefault(i, {})[j] = c
            comps[n] = SparseMatrix(rows, (target.dim(tdeg), source.dim(n)), source.domain)
        return cls(source, target, degree, comps, name=name)

    def component(self, n: int) -> SparseMatrix:
        mat = self.components.get(n)
        if mat is None:
            return SparseMatrix.zeros(self.target.dim(n + self.degree), self.source.dim(n), self.source.domain)
        return mat

    def failures(self) -> List[int]:
        """Source degrees where d f != (-1)^deg f d."""
        eps = sign(self.source.domain, self.degree)
        bad = []
        degrees = set(self.source.degrees()) | {n + 1 for n in self.source.degrees()}
        for n in sorted(degrees):
            if self.source.dim(n) == 0:
                continue
            left = self.target.d(n + self.degree) @ self.component(n)
            right = (self.component(n - 1) @ self.source.d(n)).scale(eps)
            if not (left - right).is_zero():
                bad.append(n)
        return bad

    def check(self):
        bad = self.failures()
        if bad:
            raise NotAChainMap("Chain map identity fails", {"degrees": bad, "map": self.name})


@dataclass
class HomologyGroup:
    rank: int
    torsion: List[int] = field(default_factory=list)
    trusted: bool = True


@dataclass
class HomologyTable:
    """Per-degree homology ranks, torsion (ZZ only) and trust flags."""
    groups: Dict[int, HomologyGroup]
    window: Window

    def rank(self, n: int) -> int:
        g = self.groups.get(n)
        return g.rank if g else 0

    def betti(self) -> Tuple[int, ...]:
        lo, hi = self.window
        return tuple(self.rank(n) for n in range(lo, hi + 1))

    def trusted_degrees(self) -> List[int]:
        return [n for n, g in sorted(self.groups.items()) if g.trusted]

    def is_zero(self) -> bool:
        return all(g.rank == 0 and not g.torsion for g in self.groups.values())

    def as_dict(self) -> Dict[str, Any]:
        return {
            str(n): {"rank": g.rank, "torsion": list(g.torsion), "trusted": g.trusted}
            for n, g in sorted(self.groups.items())
        }


def _matrix_rank(M: SparseMatrix) -> int:
    if M.is_zero():
        return 0
    if M.domain == ZZ:
        return len(elementary_divisors(M))
    return rank(M)


def homology(C: ChainComplex, window: Window) -> HomologyTable:
    """
    Homology of C in degrees lo..hi.

    Over a field rank_n = dim C_n - rank d_n - rank d_{n+1}; over ZZ the
    free rank is computed the same way from elementary divisor counts and
    the torsion of H_n is the list of elementary divisors of d_{n+1}
    greater than 1.

    Raises:
        DifferentialNotSquareZero: when d_n d_{n+1} != 0 for some n in the window
    """
    lo, hi = window
    if lo > hi:
        raise DimensionMismatch("Empty window", {"window": window})
    C.check_square_zero(range(lo + 1, hi + 2))
    ranks: Dict[int, int] = {}
    divisors: Dict[int, List[int]] = {}

    def rank_of(n: int) -> int:
        if n not in ranks:
            M = C.d(n)
            if C.domain == ZZ and not M.is_zero():
                divisors[n] = elementary_divisors(M)
                ranks[n] = len(divisors[n])
            else:
                divisors[n] = []
                ranks[n] = _matrix_rank(M)
        return ranks[n]

    groups: Dict[int, HomologyGroup] = {}
    for n in range(lo, hi + 1):
        r = C.dim(n) - rank_of(n) - rank_of(n + 1)
        torsion = [int(abs(v)) for v in divisors.get(n + 1, []) if abs(v) > 1] if C.domain == ZZ else []
        groups[n] = HomologyGroup(rank=r, torsion=torsion, trusted=C.trusted(n))
    logger.debug("homology of %s in [%d, %d]: %s", C.name or "complex", lo, hi,
                 [groups[n].rank for n in range(lo, hi + 1)])
    return HomologyTable(groups=groups, window=window)


def homology_class(C: ChainComplex, n: int, vec: Vector) -> Tuple[List[Vector], List[Any]]:
    """
    Coordinates of the class of a degree-n cycle in a basis of H_n.

    The basis is a set of cycles completing the image of d_{n+1}, chosen
    from the kernel basis in order. Field scalars only.

    Returns:
        (representative cycles of the H_n basis, coordinates of vec)
    """
    K = C.domain
    if not C.is_cycle(n, vec):
        raise GradingMismatch("Vector is not a cycle", {"degree": n, "complex": C.name})
    image = [col for col in C.d(n + 1).columns() if col]
    cycles = kernel_basis(C.d(n))
    _, pivots = rref(SparseMatrix.from_columns(image + cycles, C.dim(n), K))
    reps = [cycles[p - len(image)] for p in pivots if p >= len(image)]
    if not vec:
        return reps, [K.zero] * len(reps)
    y = solve(SparseMatrix.from_columns(image + reps, C.dim(n), K), vec)
    return reps, [y.get(len(image) + k, K.zero) for k in range(len(reps))]


def cone(f: ChainMap) -> ChainComplex:
    """
    Mapping cone: cone_n = target_n + source_{n-1-deg}.

    Differential in block form [[d_target, f], [0, -(-1)^deg d_source]],
    which reduces to [[d, f], [0, -d]] for degree-0 maps.
    """
    f_fail = f.failures()
    if f_fail:
        raise NotAChainMap("cone needs a chain map", {"degrees": f_fail, "map": f.name})
    S, T, k = f.source, f.target, f.degree
    K = S.domain
    eps = -sign(K, k)
    degrees = set(T.degrees()) | {n + 1 + k for n in S.degrees()}
    basis: Dict[int, List[Label]] = {}
    for n in sorted(degrees):
        labels = [("t", lab) for lab in T.module.labels(n)] + [("s", lab) for lab in S.module.labels(n - 1 - k)]
        if labels:
            basis[n] = labels
    module = GradedModule(basis)
    mats: Dict[int, SparseMatrix] = {}
    for n in module.degrees():
        if module.dim(n - 1) == 0:
            continue
        rows_sz = [T.dim(n - 1), S.dim(n - 2 - k)]
        cols_sz = [T.dim(n), S.dim(n - 1 - k)]
        blocks = [[T.d(n), f.component(n - 1 - k)],
                  [None, S.d(n - 1 - k).scale(eps)]]
        mats[n] = block_matrix(blocks, rows_sz, cols_sz, K)

    def complete(n: int) -> bool:
        return T.complete(n) and S.complete(n - 1 - k)

    return ChainComplex(module, mats, K, complete=complete, name=f"cone({f.name})")


@dataclass
class QuasiIsoCheck:
    """
    Acyclicity of the cone of f over a window.

    `failures` lists cone degrees with nonzero homology and `trusted` the
    degrees whose homology the truncation leaves intact. The check is
    definitive only when every degree of the window is trusted.
    """
    window: Window
    failures: List[int]
    trusted: List[int]

    @property
    def holds(self) -> bool:
        return not self.failures

    @property
    def untrusted(self) -> List[int]:
        lo, hi = self.window
        return [n for n in range(lo, hi + 1) if n not in self.trusted]

    @property
    def definitive(self) -> bool:
        return not self.untrusted

    def __bool__(self) -> bool:
        return self.holds

    def as_dict(self) -> Dict[str, Any]:
        return {"window": list(self.window), "holds": self.holds, "failures": list(self.failures),
                "trusted": list(self.trusted)}


def is_quasi_iso(f: ChainMap, window: Window) -> QuasiIsoCheck:
    """Check that the cone of f is acyclic in the given window; truthy when it is."""
    table = homology(cone(f), window)
    failures = [n for n, g in sorted(table.groups.items()) if g.rank or g.torsion]
    return QuasiIsoCheck(window=window, failures=failures, trusted=table.trusted_degrees())


def quasi_iso_failures(f: ChainMap, window: Window) -> List[int]:
    """Cone degrees in the window with nonzero homology."""
    return is_quasi_iso(f, window).failures
