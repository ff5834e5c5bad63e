"""
Finite simplicial complexes with ordered vertices.

A simplex is the increasing tuple of its vertex indices; the i-th face
drops the i-th vertex. Ordering the vertices turns the complex into a
simplicial set, which is what the Alexander-Whitney coproduct and the
cap product read.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from exceptions import NotOrientable, NotPure, SchemaError
from homology.complexes import ChainComplex, HomologyTable, homology
from linalg.domains import characteristic, sign
from linalg.sparse import vec_axpy

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]


def face(s: Simplex, i: int) -> Simplex:
    return s[:i] + s[i + 1:]


def boundary_terms(s: Simplex) -> List[Tuple[int, Simplex]]:
    """[(i, d_i s)] for a simplex of dimension >= 1."""
    if len(s) < 2:
        return []
    return [(i, face(s, i)) for i in range(len(s))]


class SimplicialComplex:
    """
    Parameters:
        n_vertices: vertices are 0 .. n_vertices - 1
        facets:     generating simplices; the complex is their closure
    """

    def __init__(self, n_vertices: int, facets: Iterable[Sequence[int]], name: str = ""):
        self.n_vertices = n_vertices
        self.name = name or "K"
        clean: List[Simplex] = []
        for f in facets:
            s = tuple(sorted(set(int(v) for v in f)))
            if not s:
                raise SchemaError("Empty facet", {"complex": self.name})
            if len(s) != len(f):
                raise SchemaError("Facet repeats a vertex", {"facet": tuple(f), "complex": self.name})
            if s[0] < 0 or s[-1] >= n_vertices:
                raise SchemaError("Vertex index out of range", {"facet": s, "n_vertices": n_vertices})
            clean.append(s)
        self._by_dim: Dict[int, List[Simplex]] = {}
        closure = {(v,) for v in range(n_vertices)}
        for s in clean:
            for k in range(1, len(s) + 1):
                closure.update(itertools.combinations(s, k))
        for s in sorted(closure, key=lambda t: (len(t), t)):
            self._by_dim.setdefault(len(s) - 1, []).append(s)
        # maximal simplices only
        self.facets: List[Simplex] = sorted(
            {s for s in clean if not any(set(s) < set(t) for t in clean)}, key=lambda t: (len(t), t))

    @property
    def dimension(self) -> int:
        return max(self._by_dim, default=-1)

    def simplices(self, k: int) -> List[Simplex]:
        return self._by_dim.get(k, [])

    def all_simplices(self) -> List[Simplex]:
        return [s for k in sorted(self._by_dim) for s in self._by_dim[k]]

    def edges(self) -> List[Simplex]:
        return self.simplices(1)

    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(self.simplices(k)) for k in range(self.dimension + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def is_pure(self) -> bool:
        return len({len(f) for f in self.facets}) <= 1

    def cofaces(self) -> Dict[Simplex, List[Tuple[Simplex, int]]]:
        """{s: [(t, i)]} for every t with d_i t = s."""
        out: Dict[Simplex, List[Tuple[Simplex, int]]] = {}
        for t in self.all_simplices():
            for i, s in boundary_terms(t):
                out.setdefault(s, []).append((t, i))
        return out

    def components(self) -> List[List[int]]:
        adj: Dict[int, List[int]] = {v: [] for v in range(self.n_vertices)}
        for a, b in self.edges():
            adj[a].append(b)
            adj[b].append(a)
        seen = set()
        comps = []
        for v in range(self.n_vertices):
            if v in seen:
                continue
            comp = []
            queue = deque([v])
            seen.add(v)
            while queue:
                u = queue.popleft()
                comp.append(u)
                for w in sorted(adj[u]):
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def relabel(self, perm: Sequence[int]) -> "SimplicialComplex":
        """Same complex with vertex v renamed perm[v]."""
        return SimplicialComplex(self.n_vertices, [[perm[v] for v in f] for f in self.facets], name=self.name)

    def __repr__(self):
        return f"<SimplicialComplex {self.name} f={self.f_vector()}>"


# ── Chains and homology ─────────────────────────────────────────


def chain_complex(K: SimplicialComplex, domain) -> ChainComplex:
    """Simplicial chains with d(s) = sum (-1)^i d_i s, including the vertices."""
    basis = {k: K.simplices(k) for k in range(K.dimension + 1)}

    def d(s: Simplex) -> Dict[Simplex, Any]:
        out: Dict[Simplex, Any] = {}
        for i, t in boundary_terms(s):
            vec_axpy(out, sign(domain, i), {t: domain.one})
        return out

    return ChainComplex.from_operator(basis, d, domain, name=f"C({K.name})")


def simplicial_homology(K: SimplicialComplex, domain) -> HomologyTable:
    """Homology in degrees 0 .. dim K; torsion coefficients over ZZ."""
    return homology(chain_complex(K, domain), (0, max(K.dimension, 0)))


@dataclass
class FundamentalCycle:
    degree: int
    chain: Dict[Simplex, Any]
    domain: Any

    def scaled(self, c) -> "FundamentalCycle":
        return FundamentalCycle(self.degree, {s: c * v for s, v in self.chain.items()}, self.domain)

    def boundary(self) -> Dict[Simplex, Any]:
        K = self.domain
        out: Dict[Simplex, Any] = {}
        for s, v in self.chain.items():
            for i, t in boundary_terms(s):
                vec_axpy(out, sign(K, i) * v, {t: K.one})
        return out

    def is_cycle(self) -> bool:
        return not self.boundary()


def fundamental_cycle(K: SimplicialComplex, n: int, domain) -> FundamentalCycle:
    """
    Coherently oriented sum of the n-dimensional facets.

    Orientations propagate along the dual graph: two facets sharing a
    ridge must induce opposite signs on it. In characteristic 2 every
    facet gets coefficient 1.

    Raises:
        NotPure: when some facet is not n-dimensional
        NotOrientable: when propagation meets a contradiction, or a ridge
            is not shared by exactly two facets
    """
    if any(len(f) != n + 1 for f in K.facets) or not K.facets:
        raise NotPure("Complex is not pure of the requested dimension",
                      {"n": n, "facet_dims": sorted({len(f) - 1 for f in K.facets}), "complex": K.name})
    facets = K.simplices(n)
    ridges: Dict[Simplex, List[Tuple[Simplex, int]]] = {}
    for f in facets:
        for i, r in boundary_terms(f):
            ridges.setdefault(r, []).append((f, i))
    open_ridges = [r for r, fs in ridges.items() if len(fs) != 2]
    if open_ridges and n > 0:
        raise NotOrientable("Not a closed pseudomanifold",
                            {"ridge": open_ridges[0], "facets": len(ridges[open_ridges[0]]), "complex": K.name})

    if characteristic(domain) == 2:
        chain = {f: domain.one for f in facets}
    else:
        orient: Dict[Simplex, int] = {}
        for start in facets:
            if start in orient:
                continue
            orient[start] = 0
            queue = deque([start])
            while queue:
                f = queue.popleft()
                for i, r in boundary_terms(f):
                    for g, j in ridges[r]:
                        if g == f:
                            continue
                        # induced signs (-1)^(o_f + i) and (-1)^(o_g + j) must be opposite
                        want = (orient[f] + i + j + 1) % 2
                        if g not in orient:
                            orient[g] = want
                            queue.append(g)
                        elif orient[g] != want:
                            raise NotOrientable("Orientation propagation is inconsistent",
                                                {"facet": g, "complex": K.name})
        chain = {f: sign(domain, orient[f]) for f in facets}
    alpha = FundamentalCycle(n, chain, domain)
    if not alpha.is_cycle():
        raise NotOrientable("Signed facet sum is not a cycle", {"complex": K.name})
    logger.debug("fundamental cycle of %s: %d facets", K.name, len(chain))
    return alpha


# ── Subdivisions ────────────────────────────────────────────────


def stellar_subdivision(K: SimplicialComplex, facet: Optional[Sequence[int]] = None) -> SimplicialComplex:
    """Cone a new vertex over the boundary of one facet (the first one by default)."""
    target = tuple(sorted(facet)) if facet is not None else K.facets[0]
    if target not in K.facets or len(target) < 2:
        raise SchemaError("Not a facet of positive dimension", {"facet": target, "complex": K.name})
    new = K.n_vertices
    facets = [f for f in K.facets if f != target]
    facets.extend(face(target, i) + (new,) for i in range(len(target)))
    return SimplicialComplex(K.n_vertices + 1, facets, name=f"{K.name}*")


def barycentric_subdivision(K: SimplicialComplex) -> SimplicialComplex:
    """Nerve of the face poset: one vertex per simplex, one facet per full flag."""
    index = {s: i for i, s in enumerate(K.all_simplices())}
    facets = []
    for f in K.facets:
        for perm in itertools.permutations(f):
            flag = [tuple(sorted(perm[:k])) for k in range(1, len(f) + 1)]
            facets.append([index[s] for s in flag])
    return SimplicialComplex(len(index), facets, name=f"sd({K.name})")


# ── Built-ins ───────────────────────────────────────────────────


def point() -> SimplicialComplex:
    return SimplicialComplex(1, [(0,)], name="point")


def circle(k: int = 3) -> SimplicialComplex:
    if k < 3:
        raise SchemaError("A simplicial circle needs at least 3 vertices", {"k": k})
    return SimplicialComplex(k, [(i, (i + 1) % k) for i in range(k)], name=f"circle{k}")


def sphere2() -> SimplicialComplex:
    """Boundary of the 3-simplex."""
    return SimplicialComplex(4, itertools.combinations(range(4), 3), name="sphere2")


def rp2_min() -> SimplicialComplex:
    """The 6-vertex real projective plane."""
    facets = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
              (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
    return SimplicialComplex(6, facets, name="rp2_min")


def torus7() -> SimplicialComplex:
    """The 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7."""
    facets = []
    for i in range(7):
        facets.append((i, (i + 1) % 7, (i + 3) % 7))
        facets.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex(7, facets, name="torus7")


BUILTIN_SPACES = {
    "point": point,
    "sphere2": sphere2,
    "rp2_min": rp2_min,
    "torus7": torus7,
}

SPACE_DIMENSIONS = {"point": 0, "sphere2": 2, "rp2_min": 2, "torus7": 2}


def builtin_space(name: str) -> Optional[SimplicialComplex]:
    """Look up point, sphere2, rp2_min, torus7 or circle<k>."""
    if name in BUILTIN_SPACES:
        return BUILTIN_SPACES[name]()
    if name.startswith("circle"):
        digits = name[len("circle"):].strip("()")
        if digits.isdigit():
            return circle(int(digits))
    return None


def space_dimension(name: str) -> Optional[int]:
    if name.startswith("circle"):
        return 1
    return SPACE_DIMENSIONS.get(name)


__all__ = [
    "FundamentalCycle",
    "SimplicialComplex",
    "barycentric_subdivision",
    "boundary_terms",
    "builtin_space",
    "chain_complex",
    "circle",
    "face",
    "fundamental_cycle",
    "point",
    "rp2_min",
    "simplicial_homology",
    "space_dimension",
    "sphere2",
    "stellar_subdivision",
    "torus7",
]
