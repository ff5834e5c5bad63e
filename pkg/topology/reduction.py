"""
One-vertex models: collapse a spanning tree to the base point.

K/T keeps the base point, the edges outside the tree and every simplex of
dimension >= 2. A face lying in the tree becomes degenerate: vertices go to
the base point (ONE in the coalgebra), tree edges to zero in normalized
chains. The quotient has the homology of K because T is contractible;
every reduction recomputes both sides and attaches the comparison.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional

from sympy.polys.domains import QQ

from exceptions import Disconnected, ModelInvalid, SchemaError, StructureError
from homology.complexes import ChainComplex, homology
from koszul.dgstruct import ONE, DGCoalgebra, Lin, lin_add
from linalg.domains import sign
from topology.simplicial import Simplex, SimplicialComplex, boundary_terms, chain_complex

logger = logging.getLogger(__name__)


@dataclass
class ReducedModel:
    base: SimplicialComplex
    base_vertex: int
    tree: FrozenSet[Simplex]
    parent: Dict[int, Optional[int]]
    certificate: Dict[str, Any] = field(default_factory=dict)

    def survives(self, s: Simplex) -> bool:
        return len(s) >= 2 and s not in self.tree

    def simplices(self, k: int) -> List[Simplex]:
        if k == 0:
            return [ONE]
        return [s for s in self.base.simplices(k) if self.survives(s)]

    def non_tree_edges(self) -> List[Simplex]:
        return self.simplices(1)

    def image(self, s: Simplex):
        """Class of a simplex of K in K/T: ONE, a surviving simplex, or None when degenerate."""
        if len(s) == 1:
            return ONE
        return s if self.survives(s) else None

    def boundary(self, s: Simplex, domain, reduced: bool = True) -> Lin:
        """Normalized boundary in K/T; reduced=True drops the ONE component."""
        out: Lin = {}
        for i, t in boundary_terms(s):
            img = self.image(t)
            if img is None or (reduced and img == ONE):
                continue
            lin_add(out, sign(domain, i), {img: domain.one})
        return out

    def path_to_base(self, v: int) -> List[int]:
        path = [v]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        return path

    def quotient_complex(self, domain) -> ChainComplex:
        top = max(self.base.dimension, 0)
        basis = {k: self.simplices(k) for k in range(top + 1)}

        def d(s) -> Lin:
            if s == ONE:
                return {}
            return self.boundary(s, domain, reduced=False)

        return ChainComplex.from_operator(basis, d, domain, name=f"C({self.base.name}/T)")

    def __repr__(self):
        return f"<ReducedModel {self.base.name} base={self.base_vertex} tree={len(self.tree)} edges>"


def _bfs_tree(K: SimplicialComplex, base: int):
    adj: Dict[int, List[int]] = {v: [] for v in range(K.n_vertices)}
    for a, b in K.edges():
        adj[a].append(b)
        adj[b].append(a)
    parent: Dict[int, Optional[int]] = {base: None}
    tree = set()
    queue = deque([base])
    while queue:
        u = queue.popleft()
        for w in sorted(adj[u]):
            if w not in parent:
                parent[w] = u
                tree.add((min(u, w), max(u, w)))
                queue.append(w)
    return parent, frozenset(tree)


def homology_certificate(M: ReducedModel, domain) -> Dict[str, Any]:
    top = max(M.base.dimension, 0)
    before = homology(chain_complex(M.base, domain), (0, top))
    after = homology(M.quotient_complex(domain), (0, top))
    passed = all(before.rank(k) == after.rank(k) and before.groups[k].torsion == after.groups[k].torsion
                 for k in range(top + 1))
    return {"before": before.as_dict(), "after": after.as_dict(), "passed": passed}


def reduce_by_tree(K: SimplicialComplex, base_vertex: int = 0, domain=QQ) -> ReducedModel:
    """
    Collapse the breadth-first spanning tree rooted at base_vertex.

    Raises:
        Disconnected: when K is not connected
        ModelInvalid: when the quotient changes homology over `domain`
    """
    if not 0 <= base_vertex < K.n_vertices:
        raise SchemaError("Base vertex out of range", {"base_vertex": base_vertex, "n_vertices": K.n_vertices})
    parent, tree = _bfs_tree(K, base_vertex)
    if len(parent) != K.n_vertices:
        missing = sorted(set(range(K.n_vertices)) - set(parent))
        raise Disconnected("Complex is not connected", {"complex": K.name, "unreached": missing[:5]})
    M = ReducedModel(K, base_vertex, tree, parent)
    M.certificate = homology_certificate(M, domain)
    if not M.certificate["passed"]:
        raise ModelInvalid("Tree collapse changed homology", {"complex": K.name})
    logger.debug("reduced %s: %d tree edges, %d surviving edges", K.name, len(tree), len(M.non_tree_edges()))
    return M


def chains_coalgebra(M: ReducedModel, domain) -> DGCoalgebra:
    """
    Normalized chains of K/T with the Alexander-Whitney coproduct.

    Delta(v0..vk) = sum_i (v0..vi) (x) (vi..vk); terms with a degenerate
    factor vanish, vertices become ONE.

    Raises:
        ModelInvalid: when the result fails a coalgebra axiom
    """
    K = M.base
    labels = [s for k in range(1, K.dimension + 1) for s in M.simplices(k)]
    degrees = {s: len(s) - 1 for s in labels}
    coproduct: Dict[Simplex, Lin] = {}
    differential: Dict[Simplex, Lin] = {}
    for s in labels:
        delta: Lin = {}
        for i in range(1, len(s) - 1):
            front, back = M.image(s[:i + 1]), M.image(s[i:])
            if front is None or back is None:
                continue
            lin_add(delta, domain.one, {(front, back): domain.one})
        coproduct[s] = delta
        differential[s] = M.boundary(s, domain)
    C = DGCoalgebra(degrees, coproduct, differential, domain, name=f"C({K.name}/T)")
    try:
        C.verify()
    except StructureError as exc:
        raise ModelInvalid("Chains of the reduced model are not a dg coalgebra",
                           {"complex": K.name, "cause": exc.message}) from exc
    return C


__all__ = [
    "ReducedModel",
    "chains_coalgebra",
    "homology_certificate",
    "reduce_by_tree",
]
