"""
Finite-dimensional Lie algebras given by structure constants.

[x_i, x_j] = sum_k c^k_ij x_k with c^k_ij = -c^k_ji. Only i < j is
stored; the bracket is extended by antisymmetry.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from exceptions import GradingMismatch, JacobiViolated
from linalg.domains import scalar
from linalg.sparse import vec_axpy

logger = logging.getLogger(__name__)

Bracket = Dict[Tuple[int, int], Dict[int, object]]


class LieAlgebra:
    """
    Parameters:
        names:    basis names, in basis order
        brackets: {(i, j): {k: c^k_ij}} for i < j (missing pairs commute)
        domain:   scalar domain
    """

    def __init__(self, names: Sequence[str], brackets: Bracket, domain, name: str = ""):
        self.names: List[str] = list(names)
        self.dim = len(self.names)
        self.domain = domain
        self.name = name or "g"
        table: Bracket = {}
        for (i, j), combo in brackets.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise GradingMismatch("Bracket index out of range", {"pair": (i, j), "dim": self.dim})
            if i == j:
                if any(combo.values()):
                    raise GradingMismatch("[x, x] must vanish", {"index": i})
                continue
            clean = {k: v for k, v in combo.items() if v}
            if i > j:
                i, j = j, i
                clean = {k: -v for k, v in clean.items()}
            if (i, j) in table and table[(i, j)] != clean:
                raise GradingMismatch("Bracket given twice with different values", {"pair": (i, j)})
            if clean:
                table[(i, j)] = clean
        self._table = table

    def bracket(self, i: int, j: int) -> Dict[int, object]:
        if i == j:
            return {}
        if i < j:
            return self._table.get((i, j), {})
        return {k: -v for k, v in self._table.get((j, i), {}).items()}

    def bracket_vec(self, u: Dict[int, object], v: Dict[int, object]) -> Dict[int, object]:
        out: Dict[int, object] = {}
        for i, a in u.items():
            for j, b in v.items():
                vec_axpy(out, a * b, self.bracket(i, j))
        return out

    def jacobi_failures(self) -> List[Tuple[int, int, int]]:
        K = self.domain
        bad = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(j + 1, self.dim):
                    xi, xj, xk = {i: K.one}, {j: K.one}, {k: K.one}
                    total: Dict[int, object] = {}
                    vec_axpy(total, K.one, self.bracket_vec(xi, self.bracket_vec(xj, xk)))
                    vec_axpy(total, K.one, self.bracket_vec(xj, self.bracket_vec(xk, xi)))
                    vec_axpy(total, K.one, self.bracket_vec(xk, self.bracket_vec(xi, xj)))
                    if total:
                        bad.append((i, j, k))
        return bad

    def check_jacobi(self):
        bad = self.jacobi_failures()
        if bad:
            raise JacobiViolated("Jacobi identity fails",
                                 {"triples": [tuple(self.names[t] for t in trip) for trip in bad[:5]],
                                  "algebra": self.name})

    def modular_character(self) -> List[object]:
        """chi(x_i) = tr(ad x_i) = sum_j c^j_ij."""
        K = self.domain
        return [sum((self.bracket(i, j).get(j, K.zero) for j in range(self.dim)), K.zero)
                for i in range(self.dim)]

    def is_unimodular(self) -> bool:
        return not any(self.modular_character())

    def relabel(self, perm: Sequence[int]) -> "LieAlgebra":
        """Same algebra with basis element i renamed to perm[i]."""
        names = [""] * self.dim
        for i, p in enumerate(perm):
            names[p] = self.names[i]
        brackets: Bracket = {}
        for (i, j), combo in self._table.items():
            brackets[(perm[i], perm[j])] = {perm[k]: v for k, v in combo.items()}
        return LieAlgebra(names, brackets, self.domain, name=self.name)

    def __repr__(self):
        return f"<LieAlgebra {self.name} dim={self.dim} over {self.domain}>"


# ── Built-ins ───────────────────────────────────────────────────


def _consts(domain, table: Dict[Tuple[int, int], Dict[int, int]]) -> Bracket:
    return {pair: {k: scalar(domain, v) for k, v in combo.items()} for pair, combo in table.items()}


def abelian(n: int, domain) -> LieAlgebra:
    names = [f"x{i + 1}" for i in range(n)]
    return LieAlgebra(names, {}, domain, name=f"abelian({n})")


def heisenberg(domain) -> LieAlgebra:
    """[x, y] = z."""
    return LieAlgebra(["x", "y", "z"], _consts(domain, {(0, 1): {2: 1}}), domain, name="heisenberg")


def aff1(domain) -> LieAlgebra:
    """[x, y] = y; tr ad x = 1, not unimodular."""
    return LieAlgebra(["x", "y"], _consts(domain, {(0, 1): {1: 1}}), domain, name="aff1")


def sl2(domain) -> LieAlgebra:
    """Basis (e, f, h): [h, e] = 2e, [h, f] = -2f, [e, f] = h."""
    table = {(0, 1): {2: 1}, (0, 2): {0: -2}, (1, 2): {1: 2}}
    return LieAlgebra(["e", "f", "h"], _consts(domain, table), domain, name="sl2")


BUILTIN_LIE = {
    "heisenberg": heisenberg,
    "aff1": aff1,
    "sl2": sl2,
}


def builtin_lie(name: str, domain) -> Optional[LieAlgebra]:
    """Look up heisenberg, aff1, sl2 or abelian(n) / abelianN."""
    if name in BUILTIN_LIE:
        return BUILTIN_LIE[name](domain)
    if name.startswith("abelian"):
        digits = name[len("abelian"):].strip("()")
        if digits.isdigit():
            return abelian(int(digits), domain)
    return None
