"""
Local systems on a simplicial complex, gauge-fixed along the spanning tree.

All fibers are identified with k^r through the tree, so a local system is
one invertible r x r matrix per edge outside the tree; tree edges carry
the identity. T_ab transports the fiber at a to the fiber at b (a < b).
Flatness on every 2-simplex (a, b, c) reads T_bc T_ab = T_ac, which is
the relation of the edge-path presentation evaluated in GL_r.
"""

import logging
from typing import Dict, List, Optional

from sympy.polys.domains import ZZ

from exceptions import DimensionMismatch, DomainMismatch, InfiniteRank, RelationViolated, SchemaError
from linalg.domains import is_field, scalar
from linalg.elimination import rank, solve_many
from linalg.smith import elementary_divisors
from linalg.sparse import SparseMatrix
from topology.fundamental_group import pi1_presentation, regular_permutations
from topology.reduction import ReducedModel
from topology.simplicial import Simplex

logger = logging.getLogger(__name__)


def _invertible(M: SparseMatrix) -> bool:
    if M.n_rows != M.n_cols:
        return False
    if M.domain == ZZ:
        divs = elementary_divisors(M)
        return len(divs) == M.n_rows and all(abs(int(v)) == 1 for v in divs)
    return rank(M) == M.n_rows


def _inverse(M: SparseMatrix) -> SparseMatrix:
    if not is_field(M.domain):
        raise DomainMismatch("Inverting a transport needs a field", {"domain": str(M.domain)})
    K = M.domain
    n = M.n_rows
    cols = solve_many(M, [{j: K.one} for j in range(n)])
    if any(c is None for c in cols):
        raise SchemaError("Transport matrix is not invertible", {"size": n})
    return SparseMatrix.from_columns(cols, n, K)


class LocalSystem:
    """
    Parameters:
        model:    the reduced model whose tree fixes the gauge
        rank:     fiber dimension r
        matrices: {edge: T_edge} for edges outside the tree (missing means identity)

    Raises:
        RelationViolated: when a 2-simplex relation fails
    """

    def __init__(self, model: ReducedModel, rank: int, matrices: Dict[Simplex, SparseMatrix], domain,
                 name: str = ""):
        self.model = model
        self.rank = rank
        self.domain = domain
        self.name = name or f"rank{rank}"
        self._identity = SparseMatrix.identity(rank, domain)
        self.matrices: Dict[Simplex, SparseMatrix] = {}
        for edge, T in matrices.items():
            edge = tuple(sorted(edge))
            if edge in model.tree:
                if T != self._identity:
                    raise SchemaError("Tree edges carry the identity after gauge fixing", {"edge": edge})
                continue
            if edge not in set(model.non_tree_edges()):
                raise SchemaError("Transport on a non-edge", {"edge": edge, "complex": model.base.name})
            if T.shape != (rank, rank):
                raise DimensionMismatch("Transport has the wrong size", {"edge": edge, "shape": T.shape, "rank": rank})
            if not _invertible(T):
                raise SchemaError("Transport is not invertible", {"edge": edge})
            self.matrices[edge] = T
        self.check_relations()

    def transport(self, a: int, b: int) -> SparseMatrix:
        """T along the edge a -> b with a < b."""
        return self.matrices.get((a, b), self._identity)

    def relation_failures(self) -> List[Simplex]:
        bad = []
        for a, b, c in self.model.base.simplices(2):
            if self.transport(b, c) @ self.transport(a, b) != self.transport(a, c):
                bad.append((a, b, c))
        return bad

    def check_relations(self):
        bad = self.relation_failures()
        if bad:
            raise RelationViolated("Local system is not flat on a 2-simplex",
                                   {"simplex": bad[0], "failures": len(bad), "system": self.name})

    def is_trivial(self) -> bool:
        return all(T == self._identity for T in self.matrices.values())

    def __repr__(self):
        return f"<LocalSystem {self.name} rank={self.rank} on {self.model.base.name}>"


def trivial(model: ReducedModel, domain, rank: int = 1) -> LocalSystem:
    return LocalSystem(model, rank, {}, domain, name="trivial" if rank == 1 else f"trivial^{rank}")


def from_edge_transports(model: ReducedModel, rank: int, transports: Dict[Simplex, SparseMatrix], domain,
                         name: str = "") -> LocalSystem:
    """
    Gauge-fix arbitrary transports U_ab (missing edges carry the identity).

    With phi_base = 1 and phi_v chosen so that every tree edge becomes the
    identity, the fixed transport is T_ab = phi_b U_ab phi_a^-1. Tree
    transports other than the identity need inverses, hence a field.
    """
    ident = SparseMatrix.identity(rank, domain)
    U = {tuple(sorted(e)): T for e, T in transports.items()}
    if all(U.get(e, ident) == ident for e in model.tree):
        fixed = {e: T for e, T in U.items() if e not in model.tree}
        return LocalSystem(model, rank, fixed, domain, name=name)

    phi: Dict[int, SparseMatrix] = {model.base_vertex: ident}
    phi_inv: Dict[int, SparseMatrix] = {model.base_vertex: ident}
    order = sorted(model.parent, key=lambda v: len(model.path_to_base(v)))
    for v in order:
        p = model.parent[v]
        if p is None:
            continue
        if p < v:
            phi[v] = phi[p] @ _inverse(U.get((p, v), ident))
        else:
            phi[v] = phi[p] @ U.get((v, p), ident)
        phi_inv[v] = _inverse(phi[v])
    fixed = {}
    for a, b in model.non_tree_edges():
        fixed[(a, b)] = phi[b] @ U.get((a, b), ident) @ phi_inv[a]
    return LocalSystem(model, rank, fixed, domain, name=name)


def sign_system(model: ReducedModel, signs: Dict[Simplex, int], domain, name: str = "") -> LocalSystem:
    """Rank-1 system from +-1 edge transports."""
    one = {e: SparseMatrix.from_dense([[scalar(domain, s)]], domain) for e, s in signs.items()}
    return from_edge_transports(model, 1, one, domain, name=name or "signs")


def torus_sign_system(model: ReducedModel, domain) -> LocalSystem:
    """
    On the 7-vertex torus: -1 on edges with vertex difference 1, 2, 5, 6
    (mod 7), +1 on differences 3, 4. Nontrivial on pi1, so all twisted
    homology vanishes away from characteristic 2.
    """
    signs = {}
    for a, b in model.base.edges():
        signs[(a, b)] = 1 if (b - a) % 7 in (3, 4) else -1
    return sign_system(model, signs, domain, name="torus(-1,1)")


def regular_representation(model: ReducedModel, domain, limit: Optional[int] = None) -> LocalSystem:
    """
    k[pi1] as a local system, one permutation matrix per generator.

    Raises:
        InfiniteRank: when coset enumeration does not finish within the limit
    """
    P = pi1_presentation(model)
    perms = regular_permutations(P, limit)
    if perms is None:
        raise InfiniteRank("pi1 is infinite or exceeds the coset limit", {"complex": model.base.name})
    order = len(perms[0]) if perms else 1
    mats = {}
    for edge, perm in zip(P.generators, perms):
        mats[edge] = SparseMatrix({perm[i]: {i: domain.one} for i in range(order)}, (order, order), domain)
    logger.debug("regular representation of pi1(%s): order %d", model.base.name, order)
    return LocalSystem(model, order, mats, domain, name=f"k[pi1]({order})")


__all__ = [
    "LocalSystem",
    "from_edge_transports",
    "regular_representation",
    "sign_system",
    "torus_sign_system",
    "trivial",
]
