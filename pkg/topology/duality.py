"""
Twisted (co)chains, the cap product and Poincare duality checks.

Chains with coefficients in a local system put the fiber of a simplex at
its first vertex, cochains take values in the fiber at the last vertex.
With this choice every transport runs forward along an edge:

    d(s (x) v)   = d_0 s (x) T_{s0 s1} v + sum_{i>0} (-1)^i d_i s (x) v
    (delta f)(s) = sum_{i<=p} (-1)^i f(d_i s) + (-1)^{p+1} T_{sp sp+1} f(d_{p+1} s)

Cochains sit in degree -p with differential (-1)^{p+1} delta. The cap with
alpha evaluates f on the front face and keeps the back face,

    P(f) = (-1)^{np} sum_s alpha_s f(s_0..s_p) (x) (s_p..s_n),

a chain map of degree n.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from exceptions import InfiniteRank, NotACycle
from homology.complexes import ChainComplex, ChainMap, homology, quasi_iso_failures
from koszul.dgstruct import Lin, lin_add
from linalg.domains import sign
from topology.fundamental_group import pi1_summary
from topology.local_systems import LocalSystem, regular_representation, trivial
from topology.reduction import ReducedModel, reduce_by_tree
from topology.simplicial import FundamentalCycle, SimplicialComplex, face

logger = logging.getLogger(__name__)


def twisted_chains(K: SimplicialComplex, ell: LocalSystem) -> ChainComplex:
    D = ell.domain
    r = ell.rank
    basis = {k: [(s, j) for s in K.simplices(k) for j in range(r)] for k in range(K.dimension + 1)}

    def d(lab) -> Lin:
        s, j = lab
        if len(s) < 2:
            return {}
        out: Lin = {}
        T = ell.transport(s[0], s[1])
        front = face(s, 0)
        for m, v in T.column(j).items():
            lin_add(out, v, {(front, m): D.one})
        for i in range(1, len(s)):
            lin_add(out, sign(D, i), {(face(s, i), j): D.one})
        return out

    return ChainComplex.from_operator(basis, d, D, name=f"C({K.name};{ell.name})")


def twisted_cochains(K: SimplicialComplex, ell: LocalSystem) -> ChainComplex:
    D = ell.domain
    r = ell.rank
    cofaces = K.cofaces()
    basis = {-k: [("*", s, j) for s in K.simplices(k) for j in range(r)] for k in range(K.dimension + 1)}

    def d(lab) -> Lin:
        _, s, j = lab
        p = len(s) - 1
        eps = sign(D, p + 1)
        out: Lin = {}
        for t, i in cofaces.get(s, []):
            if i <= p:
                lin_add(out, eps * sign(D, i), {("*", t, j): D.one})
            else:
                T = ell.transport(t[p], t[p + 1])
                for m, v in T.column(j).items():
                    lin_add(out, eps * sign(D, i) * v, {("*", t, m): D.one})
        return out

    return ChainComplex.from_operator(basis, d, D, name=f"C*({K.name};{ell.name})")


def twisted_complexes(K: SimplicialComplex, M: ReducedModel, ell: LocalSystem) -> Tuple[ChainComplex, ChainComplex]:
    """
    (cochains, chains) with coefficients in ell.

    Raises:
        RelationViolated: when ell is not flat
    """
    ell.check_relations()
    cochains, chains = twisted_cochains(K, ell), twisted_chains(K, ell)
    cochains.check_square_zero()
    chains.check_square_zero()
    return cochains, chains


def cap_with(alpha: FundamentalCycle, ell: LocalSystem,
             complexes: Optional[Tuple[ChainComplex, ChainComplex]] = None) -> ChainMap:
    """
    Cap with alpha as a degree-n chain map cochains(ell) -> chains(ell).

    Raises:
        NotACycle: when alpha has nonzero boundary
        NotAChainMap: when the twisted identity fails
    """
    if not alpha.is_cycle():
        raise NotACycle("Fundamental cycle has nonzero boundary", {"degree": alpha.degree})
    K = ell.model.base
    D = ell.domain
    n = alpha.degree
    source, target = complexes or twisted_complexes(K, ell.model, ell)
    by_front: Dict[Tuple, List[Tuple[Tuple, Any]]] = {}
    for s, a in alpha.chain.items():
        if not a:
            continue
        for p in range(n + 1):
            by_front.setdefault(s[:p + 1], []).append((s[p:], a))

    def f(lab) -> Lin:
        _, s, j = lab
        p = len(s) - 1
        eps = sign(D, n * p)
        out: Lin = {}
        for back, a in by_front.get(s, []):
            lin_add(out, eps * a, {(back, j): D.one})
        return out

    P = ChainMap.from_operator(source, target, n, f, name=f"cap({K.name};{ell.name})")
    P.check()
    return P


@dataclass
class SystemCheck:
    name: str
    rank: int
    cohomology: Dict[str, Any]
    homology: Dict[str, Any]
    failures: List[int]

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "rank": self.rank, "cohomology": self.cohomology,
                "homology": self.homology, "cone_failures": self.failures, "passed": self.passed}


@dataclass
class PDResult:
    n: int
    systems: List[SystemCheck] = field(default_factory=list)
    pi1_finite: bool = False
    pi1_order: Optional[int] = None
    regular_included: bool = False

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.systems)

    @property
    def definitive(self) -> bool:
        """A pass covers every local system once k[pi1] itself passed."""
        return self.passed and self.pi1_finite and self.regular_included

    def as_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "passed": self.passed, "definitive": self.definitive,
                "pi1_finite": self.pi1_finite, "pi1_order": self.pi1_order,
                "systems": [s.as_dict() for s in self.systems]}


def check_system(alpha: FundamentalCycle, ell: LocalSystem) -> SystemCheck:
    K = ell.model.base
    n = alpha.degree
    cochains, chains = twisted_complexes(K, ell.model, ell)
    P = cap_with(alpha, ell, (cochains, chains))
    failures = quasi_iso_failures(P, (0, n + 1))
    return SystemCheck(
        name=ell.name,
        rank=ell.rank,
        cohomology=homology(cochains, (-n, 0)).as_dict(),
        homology=homology(chains, (0, n)).as_dict(),
        failures=failures,
    )


def check_pd(K: SimplicialComplex, alpha: FundamentalCycle, systems: Optional[List[LocalSystem]] = None,
             M: Optional[ReducedModel] = None) -> PDResult:
    """
    Cap with alpha for every supplied local system (trivial when none).

    When pi1 is finite, k[pi1] is added: a bounded complex of free
    k[pi1]-modules acyclic on the regular representation is contractible,
    so the pass is then definitive for all local systems.
    """
    D = alpha.domain
    M = M or (systems[0].model if systems else reduce_by_tree(K, 0, D))
    systems = list(systems or [trivial(M, D)])
    summary = pi1_summary(M)
    result = PDResult(n=alpha.degree, pi1_finite=summary.finite, pi1_order=summary.order)
    if summary.finite:
        if summary.order == 1:
            result.regular_included = True
        else:
            try:
                systems.append(regular_representation(M, D))
                result.regular_included = True
            except InfiniteRank:
                logger.warning("regular representation of pi1(%s) unavailable", K.name)
    for ell in systems:
        chk = check_system(alpha, ell)
        result.systems.append(chk)
        logger.debug("cap with %s on %s: failures %s", ell.name, K.name, chk.failures)
    if result.pi1_finite and summary.order == 1 and not any(s.is_trivial() for s in systems):
        result.systems.append(check_system(alpha, trivial(M, D)))
    logger.info("check_pd %s: passed=%s definitive=%s", K.name, result.passed, result.definitive)
    return result


__all__ = [
    "PDResult",
    "SystemCheck",
    "cap_with",
    "check_pd",
    "check_system",
    "twisted_chains",
    "twisted_cochains",
    "twisted_complexes",
]
