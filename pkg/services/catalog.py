"""
Named built-in inputs for the CLI and the self-test.

Lie algebras and spaces live next to their constructions; this module
adds the coalgebra and Frobenius built-ins and the default local systems
of each space.
"""

import logging
from typing import Dict, List, Optional

from exceptions import SchemaError
from koszul.dgstruct import ONE, DGAlgebra, DGCoalgebra
from lie.algebra import BUILTIN_LIE, LieAlgebra, builtin_lie
from lie.chevalley_eilenberg import ce_coalgebra
from services.cy_verify import FrobeniusDatum
from topology.local_systems import LocalSystem, torus_sign_system, trivial
from topology.reduction import ReducedModel, chains_coalgebra, reduce_by_tree
from topology.simplicial import BUILTIN_SPACES, SimplicialComplex, builtin_space, space_dimension

logger = logging.getLogger(__name__)


def _unknown(kind: str, name: str, known: List[str]) -> SchemaError:
    return SchemaError(f"Unknown built-in {kind} '{name}'", {"field": "builtin", "known": known})


# ── Lie algebras and spaces ─────────────────────────────────────


def lie_names() -> List[str]:
    return sorted(BUILTIN_LIE) + ["abelian<n>"]


def lie(name: str, domain) -> LieAlgebra:
    g = builtin_lie(name, domain)
    if g is None:
        raise _unknown("Lie algebra", name, lie_names())
    return g


def space_names() -> List[str]:
    return sorted(BUILTIN_SPACES) + ["circle<k>"]


def space(name: str) -> SimplicialComplex:
    K = builtin_space(name)
    if K is None:
        raise _unknown("space", name, space_names())
    return K


def dimension_of(name: str, K: SimplicialComplex) -> int:
    n = space_dimension(name)
    return K.dimension if n is None else n


def default_systems(name: str, model: ReducedModel, domain) -> Optional[List[LocalSystem]]:
    """
    Local systems checked when the caller supplies none. None means the
    duality check picks them (trivial, plus k[pi1] when pi1 is finite).
    """
    if name == "torus7":
        return [trivial(model, domain), torus_sign_system(model, domain)]
    return None


# ── Frobenius algebras ──────────────────────────────────────────


def ground_field(domain) -> FrobeniusDatum:
    return FrobeniusDatum(DGAlgebra.ground(domain), {ONE: domain.one}, name="k")


def dual_numbers(domain, degenerate: bool = False) -> FrobeniusDatum:
    """k[x]/x^2 with |x| = 0; tr(x) = 1, or tr(1) = 1 for the degenerate variant."""
    A = DGAlgebra({"x": 0}, {}, {}, domain, name="k[x]/x^2")
    if degenerate:
        return FrobeniusDatum(A, {ONE: domain.one}, name="k[x]/x^2 tr(1)")
    return FrobeniusDatum(A, {"x": domain.one}, name="k[x]/x^2")


BUILTIN_FROBENIUS = {
    "k": lambda domain: ground_field(domain),
    "dual_numbers": lambda domain: dual_numbers(domain),
    "dual_numbers_degenerate": lambda domain: dual_numbers(domain, degenerate=True),
}


def frobenius(name: str, domain) -> FrobeniusDatum:
    if name not in BUILTIN_FROBENIUS:
        raise _unknown("Frobenius algebra", name, sorted(BUILTIN_FROBENIUS))
    return BUILTIN_FROBENIUS[name](domain)


# ── Coalgebras ──────────────────────────────────────────────────


def sphere_minimal(domain) -> DGCoalgebra:
    """
    Minimal coalgebra model of S^2: one primitive generator sigma of
    degree 2, so Omega is k[x] with |x| = 1.
    """
    return DGCoalgebra({"sigma": 2}, {}, {}, domain, cocommutative=True, name="S^2 minimal")


def coalgebra_names() -> List[str]:
    return ["ce_<lie>", "chains_<space>", "s2", "s2_min"]


def coalgebra(name: str, domain) -> DGCoalgebra:
    """
    ce_<lie> is C_*(g); chains_<space> (s2 for the sphere) is the reduced
    chain coalgebra; s2_min is the one-generator model of the sphere.
    """
    if name == "s2_min":
        return sphere_minimal(domain)
    if name == "s2":
        name = "chains_sphere2"
    if name.startswith("ce_"):
        return ce_coalgebra(lie(name[3:], domain))
    if name.startswith("chains_"):
        K = space(name[len("chains_"):])
        return chains_coalgebra(reduce_by_tree(K, 0, domain), domain)
    raise _unknown("coalgebra", name, coalgebra_names())


def describe() -> Dict[str, List[str]]:
    return {
        "lie": lie_names(),
        "space": space_names(),
        "frobenius": sorted(BUILTIN_FROBENIUS),
        "coalgebra": coalgebra_names(),
    }


__all__ = [
    "BUILTIN_FROBENIUS",
    "coalgebra",
    "default_systems",
    "describe",
    "dimension_of",
    "dual_numbers",
    "frobenius",
    "ground_field",
    "lie",
    "space",
    "sphere_minimal",
]
