"""
Edge-path presentation of pi1 of a one-vertex model.

Generators are the edges outside the spanning tree, oriented from the
smaller to the larger vertex. Each 2-simplex (a, b, c) gives the relation
g_ab g_bc g_ac^-1 = 1 with tree edges read as the identity. Finiteness
is decided by Todd-Coxeter coset enumeration over the trivial subgroup,
capped at COSET_LIMIT cosets.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy.combinatorics.fp_groups import FpGroup
from sympy.combinatorics.free_groups import free_group

from config.settings import settings
from exceptions import SchemaError
from topology.reduction import ReducedModel
from topology.simplicial import Simplex

logger = logging.getLogger(__name__)

Letter = Tuple[int, int]  # (generator index, +1 or -1)


@dataclass
class Presentation:
    generators: List[Simplex]
    relations: List[List[Letter]]
    names: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.names:
            self.names = [f"g{a}_{b}" for a, b in self.generators]
        for word in self.relations:
            for gen, exp in word:
                if not 0 <= gen < len(self.generators) or exp not in (1, -1):
                    raise SchemaError("Malformed relation word", {"letter": (gen, exp)})

    def word_text(self, word: List[Letter]) -> str:
        if not word:
            return "1"
        return " ".join(self.names[g] + ("^-1" if e < 0 else "") for g, e in word)

    def as_dict(self) -> Dict:
        return {"generators": self.names, "relations": [self.word_text(w) for w in self.relations]}


def pi1_presentation(M: ReducedModel) -> Presentation:
    gens = M.non_tree_edges()
    index = {e: i for i, e in enumerate(gens)}
    relations = []
    for a, b, c in M.base.simplices(2):
        word: List[Letter] = []
        for edge, exp in (((a, b), 1), ((b, c), 1), ((a, c), -1)):
            if edge in index:
                word.append((index[edge], exp))
        relations.append(word)
    P = Presentation(gens, relations)
    logger.debug("pi1 of %s: %d generators, %d relations", M.base.name, len(gens), len(relations))
    return P


def to_fp_group(P: Presentation):
    """sympy FpGroup for a presentation with at least one generator."""
    F, *gens = free_group(",".join(P.names))
    relators = []
    for word in P.relations:
        r = F.identity
        for g, e in word:
            r = r * gens[g] ** e
        if r != F.identity:
            relators.append(r)
    return FpGroup(F, relators), gens


@dataclass
class GroupSummary:
    presentation: Presentation
    order: Optional[int]
    coset_limit: int

    @property
    def finite(self) -> bool:
        return self.order is not None

    def as_dict(self) -> Dict:
        out = self.presentation.as_dict()
        out.update({"finite": self.finite, "order": self.order, "coset_limit": self.coset_limit})
        return out


def coset_table(P: Presentation, limit: Optional[int] = None):
    """
    Complete coset table of the trivial subgroup, or None when the
    enumeration exceeds `limit` cosets (pi1 infinite or too large).
    """
    limit = limit or settings.truncation.COSET_LIMIT
    if not P.generators:
        return None
    G, gens = to_fp_group(P)
    try:
        C = G.coset_enumeration([], strategy="relator_based", max_cosets=limit)
    except ValueError:
        logger.info("coset enumeration exceeded %d cosets", limit)
        return None
    C.compress()
    C.standardize()
    return C, gens


def pi1_summary(M: ReducedModel, limit: Optional[int] = None) -> GroupSummary:
    limit = limit or settings.truncation.COSET_LIMIT
    P = pi1_presentation(M)
    if not P.generators:
        return GroupSummary(P, 1, limit)
    result = coset_table(P, limit)
    order = len(result[0].table) if result else None
    return GroupSummary(P, order, limit)


def regular_permutations(P: Presentation, limit: Optional[int] = None) -> Optional[List[List[int]]]:
    """
    perms[g][i] = coset i . g for each generator, from the coset table.

    The permutations act on the right, so the matrices they define compose
    along edge paths in the order the transports of a local system do.
    """
    if not P.generators:
        return []
    result = coset_table(P, limit)
    if result is None:
        return None
    C, gens = result
    return [[row[C.A_dict[g]] for row in C.table] for g in gens]


__all__ = [
    "GroupSummary",
    "Presentation",
    "coset_table",
    "pi1_presentation",
    "pi1_summary",
    "regular_permutations",
    "to_fp_group",
]
