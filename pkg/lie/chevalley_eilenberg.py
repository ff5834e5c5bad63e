"""
Chevalley-Eilenberg chains of a Lie algebra as a cocommutative dg coalgebra.

Basis: increasing index tuples I (exterior monomials x_I), degree |I|.
Coproduct: unshuffles x_I -> sum sgn(J, K) x_J (x) x_K.
Boundary: d(x_1 ^ ... ^ x_k) = sum_{a<b} (-1)^{a+b} [x_a, x_b] ^ x_1 ^ .. ^ x_k (a, b omitted).

The Poincare duality map sends a cochain xi to (-1)^{n|xi|} (xi (x) 1) Delta(theta)
for the top monomial theta. Its target is the chain complex with the
modular twist d + iota_chi, chi = tr ad, which equals the plain CE complex
exactly when the algebra is unimodular.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

from homology.complexes import ChainComplex, ChainMap
from koszul.cyclic import MixedComplex, cohochschild_complex
from koszul.dgstruct import ONE, DGCoalgebra, DGComodule, Lin, comodule_map_failures, lin_add
from lie.algebra import LieAlgebra
from linalg.domains import characteristic, sign

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


def _sort_sign(seq: List[int]) -> int:
    """Parity of the permutation sorting seq (distinct entries)."""
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return inv % 2


def _wedge_front(k: int, rest: Monomial) -> Tuple[int, Monomial]:
    """x_k ^ x_rest as (parity, sorted monomial); parity -1 when k is in rest."""
    if k in rest:
        return -1, ()
    pos = sum(1 for r in rest if r < k)
    return pos % 2, tuple(sorted(rest + (k,)))


def monomials(dim: int) -> List[Monomial]:
    return [m for k in range(1, dim + 1) for m in itertools.combinations(range(dim), k)]


def unshuffle(mono: Monomial, domain, include_empty: bool = False) -> Lin:
    """Delta(x_I) as {(J, K): sgn}, J and K increasing; ONE stands for the empty monomial."""
    out: Lin = {}
    n = len(mono)
    lo, hi = (0, n) if include_empty else (1, n - 1)
    for size in range(lo, hi + 1):
        for J in itertools.combinations(mono, size):
            Kc = tuple(x for x in mono if x not in J)
            par = _sort_sign(list(J) + list(Kc))
            key = (J or ONE, Kc or ONE)
            lin_add(out, sign(domain, par), {key: domain.one})
    return out


def ce_boundary(g: LieAlgebra, mono: Monomial) -> Lin:
    K = g.domain
    out: Lin = {}
    k = len(mono)
    for a in range(k):
        for b in range(a + 1, k):
            rest = mono[:a] + mono[a + 1:b] + mono[b + 1:]
            eps = sign(K, (a + 1) + (b + 1))
            for m, c in g.bracket(mono[a], mono[b]).items():
                par, wedge = _wedge_front(m, rest)
                if par < 0:
                    continue
                lin_add(out, eps * sign(K, par) * c, {wedge or ONE: K.one})
    return out


def modular_contraction(g: LieAlgebra, mono: Monomial, chi) -> Lin:
    """iota_chi(x_1 ^ ... ^ x_k) = sum_i (-1)^{i+1} chi(x_i) (.. x_i omitted ..)."""
    K = g.domain
    out: Lin = {}
    for i, x in enumerate(mono):
        if chi[x]:
            rest = mono[:i] + mono[i + 1:]
            lin_add(out, sign(K, i) * chi[x], {rest or ONE: K.one})
    return out


def ce_coalgebra(g: LieAlgebra) -> DGCoalgebra:
    """
    C_*(g) with reduced part spanned by the nonempty monomials.

    Raises:
        JacobiViolated: when the structure constants fail Jacobi
    """
    g.check_jacobi()
    K = g.domain
    if characteristic(K) and characteristic(K) <= g.dim:
        logger.warning("characteristic %d <= dim %d: homology may differ from characteristic 0",
                       characteristic(K), g.dim)
    monos = monomials(g.dim)
    degrees = {m: len(m) for m in monos}
    coproduct = {m: unshuffle(m, K) for m in monos}
    differential: Dict[Monomial, Lin] = {}
    for m in monos:
        d = ce_boundary(g, m)
        d.pop(ONE, None)
        differential[m] = d
    C = DGCoalgebra(degrees, coproduct, differential, K, cocommutative=True, name=f"CE({g.name})")
    return C


def theta(g: LieAlgebra) -> Monomial:
    return tuple(range(g.dim))


def ce_complex(g: LieAlgebra, twisted: bool = False) -> ChainComplex:
    """CE chains including degree 0; with twisted=True the differential is d + iota_chi."""
    K = g.domain
    chi = g.modular_character()
    basis: Dict[int, List] = {0: [ONE]}
    for m in monomials(g.dim):
        basis.setdefault(len(m), []).append(m)

    def d(lab) -> Lin:
        if lab == ONE:
            return {}
        out = ce_boundary(g, lab)
        if twisted:
            lin_add(out, K.one, modular_contraction(g, lab, chi))
        return out

    return ChainComplex.from_operator(basis, d, K, name=f"CE({g.name}){'^chi' if twisted else ''}")


def cochain_complex(C: DGCoalgebra) -> ChainComplex:
    """C* with d(xi) = -(-1)^{|xi|} xi o d, labels ("*", c)."""
    return DGComodule.regular(C).dual().as_complex()


def pd_formula(g: LieAlgebra, th: Monomial, scale=None):
    """xi -> (-1)^{n|xi|} (xi (x) 1) Delta(theta), on dual labels ("*", c)."""
    K = g.domain
    n = len(th)
    coeff = K.one if scale is None else scale
    delta = unshuffle(th, K, include_empty=True)
    by_front: Dict = {}
    for (J, Kc), v in delta.items():
        by_front.setdefault(J, {})[Kc] = v

    def f(lab) -> Lin:
        c = lab[1]
        deg = 0 if c == ONE else len(c)
        eps = sign(K, n * deg)
        return {k: coeff * eps * v for k, v in by_front.get(c, {}).items()}

    return f


def pd_map(g: LieAlgebra, th: Monomial = None, twisted: bool = True) -> ChainMap:
    """
    Cap with theta as a degree-n chain map C^*(g) -> C_*(g).

    The default target carries the modular twist, which makes the map a
    chain map for every Lie algebra; twisted=False targets the plain CE
    complex (a chain map exactly in the unimodular case).
    """
    th = theta(g) if th is None else th
    C = ce_coalgebra(g)
    source = cochain_complex(C)
    target = ce_complex(g, twisted=twisted)
    f = ChainMap.from_operator(source, target, len(th), pd_formula(g, th), name=f"PD({g.name})")
    if twisted:
        f.check()
    return f


def pd_comodule_failures(g: LieAlgebra, th: Monomial = None, side: str = "left") -> List:
    """Dual labels where the cap with theta fails to be a map of comodules C* -> C."""
    th = theta(g) if th is None else th
    C = ce_coalgebra(g)
    reg = DGComodule.regular(C)
    return comodule_map_failures(reg.dual(), reg, pd_formula(g, th), len(th), side=side)


@dataclass
class PDClass:
    """theta (x) [] in coCH_n(C_*(g)) with its cycle and B-image status."""
    chain: Lin
    degree: int
    is_cycle: bool
    B_image_zero: bool
    mixed: MixedComplex


def pd_class_cochain(g: LieAlgebra, th: Monomial = None, cap: int = 4, window=(0, 3)) -> PDClass:
    th = theta(g) if th is None else th
    C = ce_coalgebra(g)
    n = len(th)
    lo, hi = window
    mixed = cohochschild_complex(C, max(cap, C.weight(th)), (min(lo, n), max(hi, n)))
    chain = {(th, ONE): g.domain.one}
    M = mixed.complex
    vec = M.module.vector(n, chain)
    cyc = M.is_cycle(n, vec)
    Bz = mixed.B_matrix(n).apply(vec)
    logger.debug("PD class of %s: cycle=%s B=0:%s", g.name, cyc, not Bz)
    return PDClass(chain=chain, degree=n, is_cycle=cyc, B_image_zero=not Bz, mixed=mixed)
