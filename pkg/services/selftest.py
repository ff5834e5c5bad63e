"""
Seeded structural identity suite.

Every built-in and a batch of random small coalgebras, algebras, Lie
algebras and integer matrices are pushed through the constructions, and
the identities that gate the sign conventions are checked exactly:
d^2 = 0, coassociativity, Maurer-Cartan, b^2 = B^2 = bB + Bb = 0,
Jacobi <=> d_CE^2 = 0 and U S V = M for Smith forms.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from sympy import Matrix
from sympy.polys.domains import ZZ

from config.settings import settings
from exceptions import KoszulError, StructureError
from koszul.barcobar import CobarAlgebra, bar, bar_tau, universal_tau
from koszul.cyclic import cohochschild_complex, hochschild_complex
from koszul.dgstruct import DGAlgebra, DGCoalgebra, DGComodule, RegularModule, require_mc
from koszul.twisted import twisted_tensor
from lie.algebra import BUILTIN_LIE, LieAlgebra, abelian
from lie.chevalley_eilenberg import ce_coalgebra, ce_complex
from linalg.domains import scalar
from linalg.smith import smith_normal_form
from linalg.sparse import SparseMatrix
from services import catalog

logger = logging.getLogger(__name__)

LETTERS = "abcdef"


@dataclass
class SelftestResult:
    seed: int
    cases: int = 0
    checks: Dict[str, int] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def run(self, name: str, subject: str, check: Callable[[], Any]):
        """Run one check; a string result or a KoszulError counts as a failure."""
        self.checks[name] = self.checks.get(name, 0) + 1
        try:
            problem = check()
        except KoszulError as exc:
            problem = f"{type(exc).__name__}: {exc.message}"
        if isinstance(problem, str):
            self.failures.append(f"{name} [{subject}]: {problem}")
            logger.warning("selftest %s failed on %s: %s", name, subject, problem)

    def as_dict(self) -> Dict[str, Any]:
        return {"seed": self.seed, "cases": self.cases, "checks": dict(sorted(self.checks.items())),
                "failures": self.failures, "passed": self.passed}


# ── Random inputs ───────────────────────────────────────────────


def _tensor_shape(rng: random.Random, max_rank: int):
    """(letters, max word length) with sum_{j<=m} k^j <= max_rank."""
    k = rng.choice([1, 1, 2]) if max_rank >= 6 else 1
    m = 1
    while sum(k ** j for j in range(1, m + 2)) <= max_rank and m < max_rank:
        m += 1
    m = rng.randint(1, m)
    return LETTERS[:k], m


def _words(letters: str, m: int) -> List[str]:
    out = list(letters)
    layer = list(letters)
    for _ in range(m - 1):
        layer = [w + a for w in layer for a in letters]
        out.extend(layer)
    return out


def random_tensor_coalgebra(rng: random.Random, domain, max_rank: int, max_degree: int) -> DGCoalgebra:
    """Truncated tensor coalgebra with deconcatenation and random letter degrees."""
    letters, m = _tensor_shape(rng, max_rank)
    deg = {a: rng.randint(0, max(max_degree // m, 0)) for a in letters}
    words = _words(letters, m)
    degrees = {w: sum(deg[a] for a in w) for w in words}
    coproduct = {w: {(w[:i], w[i:]): domain.one for i in range(1, len(w))} for w in words}
    return DGCoalgebra(degrees, coproduct, {}, domain, name=f"T^c({letters};{m})")


def random_tensor_algebra(rng: random.Random, domain, max_rank: int, max_degree: int) -> DGAlgebra:
    """Free algebra modulo words longer than m, random letter degrees."""
    letters, m = _tensor_shape(rng, max_rank)
    deg = {a: rng.randint(0, max(max_degree // m, 0)) for a in letters}
    words = _words(letters, m)
    degrees = {w: sum(deg[a] for a in w) for w in words}
    product = {(u, v): {u + v: domain.one} for u in words for v in words if len(u) + len(v) <= m}
    return DGAlgebra(degrees, product, {}, domain, name=f"T({letters})/{m + 1}")


def random_structure_constants(rng: random.Random, domain, dim: int) -> LieAlgebra:
    """Nilpotent-shaped brackets [x_i, x_j] in span(x_k, k > j); Jacobi may fail."""
    brackets = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            combo = {k: scalar(domain, rng.randint(-1, 1)) for k in range(j + 1, dim)}
            combo = {k: v for k, v in combo.items() if v}
            if combo:
                brackets[(i, j)] = combo
    return LieAlgebra([f"x{i}" for i in range(dim)], brackets, domain, name=f"random{dim}")


def random_relabelled_lie(rng: random.Random, domain) -> LieAlgebra:
    """A built-in (or abelian) algebra under a random permutation of its basis."""
    name = rng.choice(sorted(BUILTIN_LIE) + ["abelian"])
    g = abelian(rng.randint(1, 3), domain) if name == "abelian" else BUILTIN_LIE[name](domain)
    perm = list(range(g.dim))
    rng.shuffle(perm)
    return g.relabel(perm)


def random_integer_matrix(rng: random.Random, domain, rows: int, cols: int, bound: int = 4) -> SparseMatrix:
    data = [[scalar(domain, rng.randint(-bound, bound)) for _ in range(cols)] for _ in range(rows)]
    return SparseMatrix.from_dense(data, domain)


# ── Checks ──────────────────────────────────────────────────────


def _square_zero(build) -> Callable[[], Optional[str]]:
    def check():
        build().check_square_zero()
        return None
    return check


def coalgebra_checks(result: SelftestResult, C: DGCoalgebra, cap: int, window):
    result.run("coalgebra.verify", C.name, C.verify)
    result.run("cobar.d2", C.name, _square_zero(lambda: CobarAlgebra(C, cap).as_complex()))
    result.run("tau.mc", C.name, lambda: require_mc(universal_tau(C, cap), cap))

    def twisted():
        tau = universal_tau(C, cap)
        return twisted_tensor("left", DGComodule.regular(C), tau, RegularModule(tau.target), cap, window)

    result.run("twisted_tensor.d2", C.name, _square_zero(twisted))

    def mixed():
        bad = cohochschild_complex(C, cap, window).failures()
        return ", ".join(bad) if bad else None

    result.run("cohochschild.mixed", C.name, mixed)


def algebra_checks(result: SelftestResult, A: DGAlgebra, cap: int, window):
    result.run("algebra.verify", A.name, A.verify)

    def bar_ok():
        B = bar(A, cap)
        B.verify()
        require_mc(bar_tau(B, A))
        return None

    result.run("bar.verify", A.name, bar_ok)

    def mixed():
        bad = hochschild_complex(A, cap, window).failures()
        return ", ".join(bad) if bad else None

    result.run("hochschild.mixed", A.name, mixed)


def jacobi_check(result: SelftestResult, g: LieAlgebra):
    def agree():
        jacobi = not g.jacobi_failures()
        try:
            ce_complex(g).check_square_zero()
            square_zero = True
        except StructureError:
            square_zero = False
        if jacobi != square_zero:
            return f"Jacobi={jacobi} but d^2=0 is {square_zero}"
        return None

    result.run("lie.jacobi_iff_d2", g.name, agree)


def smith_check(result: SelftestResult, M: SparseMatrix):
    def check():
        S, P, Q = smith_normal_form(M)
        if P @ M @ Q != S:
            return "P M Q != S"
        for T in (P, Q):
            if Matrix([[int(v) for v in row] for row in T.to_dense()]).det() not in (1, -1):
                return "transform is not unimodular"
        diag = [S.rows.get(t, {}).get(t, 0) for t in range(min(M.shape))]
        nonzero = [abs(int(v)) for v in diag if v]
        if any(b % a for a, b in zip(nonzero, nonzero[1:])):
            return f"divisibility chain broken: {nonzero}"
        if len(nonzero) != Matrix([[int(v) for v in row] for row in M.to_dense()]).rank():
            return "rank differs from sympy"
        return None

    result.run("smith.factorization", f"{M.n_rows}x{M.n_cols}", check)


# ── Runner ──────────────────────────────────────────────────────


def run_selftest(domain, seed: Optional[int] = None, cases: Optional[int] = None, cap: int = 3) -> SelftestResult:
    """Built-ins first, then `cases` random inputs drawn from a generator seeded with `seed`."""
    cfg = settings.selftest
    seed = cfg.SEED if seed is None else seed
    cases = cfg.RANDOM_CASES if cases is None else cases
    rng = random.Random(seed)
    window = (-cap, cap * cfg.MAX_DEGREE)
    result = SelftestResult(seed=seed)

    for name in sorted(BUILTIN_LIE) + ["abelian2"]:
        g = catalog.lie(name, domain)
        jacobi_check(result, g)
        coalgebra_checks(result, ce_coalgebra(g), cap, window)
    coalgebra_checks(result, catalog.coalgebra("s2", domain), cap, window)
    for name in sorted(catalog.BUILTIN_FROBENIUS):
        algebra_checks(result, catalog.frobenius(name, domain).algebra, cap, window)

    for i in range(cases):
        result.cases += 1
        kind = i % 4
        if kind == 0:
            C = random_tensor_coalgebra(rng, domain, cfg.MAX_RANK, cfg.MAX_DEGREE)
            coalgebra_checks(result, C, cap, window)
        elif kind == 1:
            A = random_tensor_algebra(rng, domain, cfg.MAX_RANK, cfg.MAX_DEGREE)
            algebra_checks(result, A, cap, window)
        elif kind == 2:
            jacobi_check(result, random_structure_constants(rng, domain, rng.randint(3, 5)))
            g = random_relabelled_lie(rng, domain)
            jacobi_check(result, g)
            result.run("ce.verify", g.name, lambda: ce_coalgebra(g).verify())
        else:
            smith_check(result, random_integer_matrix(rng, ZZ, rng.randint(1, cfg.MAX_RANK),
                                                      rng.randint(1, cfg.MAX_RANK)))
    logger.info("selftest seed=%d: %d random cases, %d checks, %d failures",
                seed, result.cases, sum(result.checks.values()), len(result.failures))
    return result


__all__ = [
    "SelftestResult",
    "random_integer_matrix",
    "random_relabelled_lie",
    "random_structure_constants",
    "random_tensor_algebra",
    "random_tensor_coalgebra",
    "run_selftest",
]
