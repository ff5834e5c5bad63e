"""
Differential graded structures in the one-point (coaugmented) setting.

Conventions
───────────
- Homological grading, differentials of degree -1, Koszul sign rule.
- ONE = () labels the unit of an algebra and the coaugmentation of a
  coalgebra. Coalgebras store only the reduced part C-bar; algebras store
  only the augmentation ideal A-bar. ONE is implicit in both.
- Linear combinations are dicts {label: scalar}; tensors use tuple keys.
- Every object carries a weight filtration. A coalgebra element c has
  level l(c) >= 1, the smallest value with l(c') + l(c'') <= l(c) on every
  reduced coproduct term and l(e) <= l(c) on every term of dc. Finite
  algebras put weight 1 on A-bar. F_L (weight <= L) is preserved by every
  differential built on top, which is what makes truncation exact.
- Degree profiles {degree: max weight} describe the untruncated object and
  decide which degrees a truncation left complete; None means some degree
  is infinite dimensional.
"""

import logging
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Tuple

from exceptions import (
    DifferentialNotSquareZero,
    GradingMismatch,
    LeibnizViolated,
    MaurerCartanViolated,
    NotAssociative,
    NotAugmented,
    NotCoassociative,
    NotConilpotent,
)
from homology.complexes import ChainComplex
from linalg.domains import sign
from linalg.sparse import vec_axpy

logger = logging.getLogger(__name__)

ONE: Tuple = ()

Label = Hashable
Lin = Dict[Label, Any]
Profile = Optional[Dict[int, int]]


def lin_add(target: Lin, coeff, source: Lin) -> Lin:
    return vec_axpy(target, coeff, source)


def lin_is_zero(x: Lin) -> bool:
    return not any(v for v in x.values())


def combine_profiles(profiles: Iterable[Profile]) -> Profile:
    """Max-plus convolution of degree profiles of tensor factors."""
    acc: Dict[int, int] = {0: 0}
    for prof in profiles:
        if prof is None:
            return None
        nxt: Dict[int, int] = {}
        for d1, w1 in acc.items():
            for d2, w2 in prof.items():
                key = d1 + d2
                if key not in nxt or nxt[key] < w1 + w2:
                    nxt[key] = w1 + w2
        acc = nxt
    return acc


def profile_of(labels: Iterable[Label], degree: Callable, weight: Callable) -> Dict[int, int]:
    prof: Dict[int, int] = {}
    for lab in labels:
        dg, w = degree(lab), weight(lab)
        if dg not in prof or prof[dg] < w:
            prof[dg] = w
    return prof


def completeness(profile: Profile, cap: int) -> Callable[[int], bool]:
    if profile is None:
        return lambda _n: False
    return lambda n: profile.get(n, cap) <= cap


# ── Coalgebras ──────────────────────────────────────────────────


class DGCoalgebra:
    """
    Conilpotent dg coalgebra C = k.ONE + C-bar given by structure constants.

    Parameters:
        degrees:       {label: degree} for the basis of C-bar, in basis order
        coproduct:     {label: {(left, right): coeff}}, reduced coproduct
        differential:  {label: {label: coeff}}
        domain:        scalar domain
        curvature:     {label: coeff}, degree -2 functional h (default 0)
        cocommutative: flag, verified by `verify`
        profile:       optional callable max_degree -> Profile of the
                       untruncated coalgebra this one truncates
    """

    def __init__(self, degrees: Dict[Label, int], coproduct: Dict[Label, Lin], differential: Dict[Label, Lin],
                 domain, curvature: Optional[Dict[Label, Any]] = None, cocommutative: bool = False,
                 name: str = "", profile: Optional[Callable[[int], Profile]] = None):
        if ONE in degrees:
            raise GradingMismatch("ONE is reserved for the coaugmentation", {"coalgebra": name})
        self.labels: List[Label] = list(degrees)
        self._degrees = dict(degrees)
        self.domain = domain
        self.name = name
        self.cocommutative = cocommutative
        self._coproduct = {c: {k: v for k, v in coproduct.get(c, {}).items() if v} for c in self.labels}
        self._differential = {c: {k: v for k, v in differential.get(c, {}).items() if v} for c in self.labels}
        self._curvature = {c: v for c, v in (curvature or {}).items() if v}
        self._profile = profile
        self._check_labels()
        self._levels = self._compute_levels()

    def _check_labels(self):
        known = set(self.labels)
        for c in self.labels:
            for (a, b) in self._coproduct[c]:
                if a not in known or b not in known:
                    raise GradingMismatch("Coproduct term outside C-bar", {"label": repr(c)})
                if self._degrees[a] + self._degrees[b] != self._degrees[c]:
                    raise GradingMismatch("Coproduct is not degree 0", {"label": repr(c)})
            for e in self._differential[c]:
                if e not in known:
                    raise GradingMismatch("Differential term outside C-bar", {"label": repr(c)})
                if self._degrees[e] != self._degrees[c] - 1:
                    raise GradingMismatch("Differential is not degree -1", {"label": repr(c)})
        for c in self._curvature:
            if self._degrees.get(c) != 2:
                raise GradingMismatch("Curvature must be supported in degree 2", {"label": repr(c)})

    def _compute_levels(self) -> Dict[Label, int]:
        levels: Dict[Label, int] = {}
        on_stack = set()

        def visit(c) -> int:
            if c in levels:
                return levels[c]
            if c in on_stack:
                raise NotConilpotent("Iterated coproduct/differential returns to a basis element",
                                     {"label": repr(c), "coalgebra": self.name})
            on_stack.add(c)
            lvl = 1
            for (a, b) in self._coproduct[c]:
                lvl = max(lvl, visit(a) + visit(b))
            for e in self._differential[c]:
                lvl = max(lvl, visit(e))
            on_stack.discard(c)
            levels[c] = lvl
            return lvl

        for c in self.labels:
            visit(c)
        return levels

    # ── structure access ──

    def degree(self, c: Label) -> int:
        return 0 if c == ONE else self._degrees[c]

    def weight(self, c: Label) -> int:
        return 0 if c == ONE else self._levels[c]

    def reduced_coproduct(self, c: Label) -> Lin:
        return {} if c == ONE else self._coproduct[c]

    def coproduct(self, c: Label) -> Lin:
        """Full coproduct including the ONE (x) c and c (x) ONE terms."""
        one = self.domain.one
        if c == ONE:
            return {(ONE, ONE): one}
        out = {(ONE, c): one, (c, ONE): one}
        lin_add(out, one, self._coproduct[c])
        return out

    def d(self, c: Label) -> Lin:
        return {} if c == ONE else self._differential[c]

    def h(self, c: Label):
        return self._curvature.get(c, self.domain.zero)

    @property
    def has_curvature(self) -> bool:
        return bool(self._curvature)

    @property
    def is_truncation(self) -> bool:
        """True when this coalgebra is a finite truncation of a larger one."""
        return self._profile is not None

    def conilpotency_depth(self) -> int:
        return max(self._levels.values(), default=0)

    def basis(self) -> List[Label]:
        return [ONE] + self.labels

    def degree_profile(self, max_degree: int) -> Profile:
        if self._profile is not None:
            return self._profile(max_degree)
        return profile_of(self.basis(), self.degree, self.weight)

    # ── axioms ──

    def _apply_left(self, tensor: Lin) -> Lin:
        out: Lin = {}
        for (a, b), v in tensor.items():
            for (a1, a2), w in self.reduced_coproduct(a).items():
                lin_add(out, v, {(a1, a2, b): w})
        return out

    def _apply_right(self, tensor: Lin) -> Lin:
        out: Lin = {}
        for (a, b), v in tensor.items():
            for (b1, b2), w in self.reduced_coproduct(b).items():
                lin_add(out, v, {(a, b1, b2): w})
        return out

    def coassociativity_failures(self) -> List[Label]:
        return [c for c in self.labels
                if self._apply_left(self._coproduct[c]) != self._apply_right(self._coproduct[c])]

    def coderivation_failures(self) -> List[Label]:
        K = self.domain
        bad = []
        for c in self.labels:
            lhs: Lin = {}
            for e, v in self._differential[c].items():
                lin_add(lhs, v, self._coproduct[e])
            rhs: Lin = {}
            for (a, b), v in self._coproduct[c].items():
                for e, w in self.d(a).items():
                    lin_add(rhs, v * w, {(e, b): K.one})
                for e, w in self.d(b).items():
                    lin_add(rhs, v * w * sign(K, self.degree(a)), {(a, e): K.one})
            if lhs != rhs:
                bad.append(c)
        return bad

    def square_zero_failures(self) -> List[Label]:
        """Labels where d^2 differs from the curvature commutator (h (x) 1 - 1 (x) h) Delta."""
        bad = []
        for c in self.labels:
            dd: Lin = {}
            for e, v in self._differential[c].items():
                lin_add(dd, v, self._differential[e])
            expected: Lin = {}
            for (a, b), v in self.coproduct(c).items():
                if self.h(a):
                    lin_add(expected, v * self.h(a), {b: self.domain.one})
                if self.h(b):
                    lin_add(expected, -v * self.h(b), {a: self.domain.one})
            expected.pop(ONE, None)
            if dd != expected:
                bad.append(c)
        return bad

    def cocommutativity_failures(self) -> List[Label]:
        K = self.domain
        bad = []
        for c in self.labels:
            swapped: Lin = {}
            for (a, b), v in self._coproduct[c].items():
                lin_add(swapped, v * sign(K, self.degree(a) * self.degree(b)), {(b, a): K.one})
            if swapped != self._coproduct[c]:
                bad.append(c)
        return bad

    def verify(self):
        """Check coassociativity, coderivation, d^2 and the cocommutativity flag."""
        bad = self.coassociativity_failures()
        if bad:
            raise NotCoassociative("Reduced coproduct is not coassociative",
                                   {"labels": [repr(b) for b in bad[:5]], "coalgebra": self.name})
        bad = self.coderivation_failures()
        if bad:
            raise LeibnizViolated("Differential is not a coderivation",
                                  {"labels": [repr(b) for b in bad[:5]], "coalgebra": self.name})
        bad = self.square_zero_failures()
        if bad:
            raise DifferentialNotSquareZero("d^2 differs from the curvature term",
                                            {"labels": [repr(b) for b in bad[:5]], "coalgebra": self.name})
        if self.cocommutative:
            bad = self.cocommutativity_failures()
            if bad:
                raise NotCoassociative("Cocommutativity flag set but swap(Delta) != Delta",
                                       {"labels": [repr(b) for b in bad[:5]], "coalgebra": self.name})
        return True

    # ── derived objects ──

    def as_complex(self) -> ChainComplex:
        """Underlying complex of C = k.ONE + C-bar."""
        basis: Dict[int, List[Label]] = {}
        for c in self.basis():
            basis.setdefault(self.degree(c), []).append(c)
        return ChainComplex.from_operator(basis, self.d, self.domain, name=f"{self.name}")

    def opposite(self) -> "DGCoalgebra":
        """C^op: same differential, coproduct swapped with the Koszul sign."""
        K = self.domain
        cop: Dict[Label, Lin] = {}
        for c in self.labels:
            out: Lin = {}
            for (a, b), v in self._coproduct[c].items():
                lin_add(out, v * sign(K, self.degree(a) * self.degree(b)), {(b, a): K.one})
            cop[c] = out
        return DGCoalgebra(self._degrees, cop, self._differential, K, curvature=self._curvature,
                           cocommutative=self.cocommutative, name=f"{self.name}^op", profile=self._profile)

    @classmethod
    def ground(cls, domain) -> "DGCoalgebra":
        """The ground field as a coalgebra (C-bar = 0)."""
        return cls({}, {}, {}, domain, cocommutative=True, name="k")

    def __repr__(self):
        return f"<DGCoalgebra {self.name} rank={len(self.labels)} over {self.domain}>"


# ── Algebras ────────────────────────────────────────────────────


class DGAlgebra:
    """
    Finite-dimensional dg algebra A = k.ONE + A-bar.

    A-bar is the augmentation ideal when products and differentials of
    labels stay inside it. Terms on ONE are accepted but clear `augmented`,
    and constructions that need the augmentation refuse such algebras.

    Parameters:
        degrees:      {label: degree} for A-bar
        product:      {(a, b): {label: coeff}} for a, b in A-bar (missing = 0)
        differential: {label: {label: coeff}}
    """

    def __init__(self, degrees: Dict[Label, int], product: Dict[Tuple[Label, Label], Lin],
                 differential: Dict[Label, Lin], domain, name: str = ""):
        if ONE in degrees:
            raise GradingMismatch("ONE is reserved for the unit", {"algebra": name})
        self.labels: List[Label] = list(degrees)
        self._degrees = dict(degrees)
        self.domain = domain
        self.name = name
        self._product = {k: {a: v for a, v in lin.items() if v} for k, lin in product.items()}
        self._differential = {a: {k: v for k, v in differential.get(a, {}).items() if v} for a in self.labels}
        self.augmented = True
        for (a, b), lin in self._product.items():
            for e in lin:
                if e != ONE and e not in self._degrees:
                    raise GradingMismatch("Product leaves the basis", {"pair": repr((a, b))})
                if self.degree(e) != self._degrees[a] + self._degrees[b]:
                    raise GradingMismatch("Product is not degree 0", {"pair": repr((a, b))})
                if e == ONE:
                    self.augmented = False
        for a, lin in self._differential.items():
            for e in lin:
                if e != ONE and e not in self._degrees:
                    raise GradingMismatch("Differential leaves the basis", {"label": repr(a)})
                if self.degree(e) != self._degrees[a] - 1:
                    raise GradingMismatch("Differential is not degree -1", {"label": repr(a)})
                if e == ONE:
                    self.augmented = False

    def degree(self, a: Label) -> int:
        return 0 if a == ONE else self._degrees[a]

    def weight(self, a: Label) -> int:
        return 0 if a == ONE else 1

    def require_augmented(self):
        if not self.augmented:
            raise NotAugmented("Product or differential reaches the unit", {"algebra": self.name})

    def mul(self, a: Label, b: Label) -> Lin:
        if a == ONE:
            return {b: self.domain.one}
        if b == ONE:
            return {a: self.domain.one}
        return self._product.get((a, b), {})

    def d(self, a: Label) -> Lin:
        return {} if a == ONE else self._differential[a]

    def basis(self) -> List[Label]:
        return [ONE] + self.labels

    def labels_by_weight(self, cap: int) -> List[Label]:
        if cap < 0:
            return []
        return self.basis() if cap >= 1 else [ONE]

    def weight_counts(self, cap: int) -> List[int]:
        counts = [1] + [0] * max(cap, 0)
        if cap >= 1:
            counts[1] = len(self.labels)
        return counts[:cap + 1] if cap >= 0 else []

    def degree_profile(self, max_degree: int) -> Profile:
        return profile_of(self.basis(), self.degree, self.weight)

    def mul_lin(self, x: Lin, y: Lin) -> Lin:
        out: Lin = {}
        for a, u in x.items():
            for b, v in y.items():
                lin_add(out, u * v, self.mul(a, b))
        return out

    def associativity_failures(self) -> List[Tuple]:
        K = self.domain
        bad = []
        for a in self.labels:
            for b in self.labels:
                ab = self.mul(a, b)
                for c in self.labels:
                    left = self.mul_lin(ab, {c: K.one})
                    right = self.mul_lin({a: K.one}, self.mul(b, c))
                    if left != right:
                        bad.append((a, b, c))
        return bad

    def leibniz_failures(self) -> List[Tuple]:
        K = self.domain
        bad = []
        for a in self.labels:
            for b in self.labels:
                lhs: Lin = {}
                for e, v in self.mul(a, b).items():
                    lin_add(lhs, v, self.d(e))
                rhs = self.mul_lin(self.d(a), {b: K.one})
                lin_add(rhs, sign(K, self.degree(a)), self.mul_lin({a: K.one}, self.d(b)))
                if lhs != rhs:
                    bad.append((a, b))
        return bad

    def square_zero_failures(self) -> List[Label]:
        bad = []
        for a in self.labels:
            dd: Lin = {}
            for e, v in self.d(a).items():
                lin_add(dd, v, self.d(e))
            if dd:
                bad.append(a)
        return bad

    def verify(self):
        bad = self.associativity_failures()
        if bad:
            raise NotAssociative("Product is not associative", {"triples": [repr(t) for t in bad[:5]]})
        bad = self.leibniz_failures()
        if bad:
            raise LeibnizViolated("Differential is not a derivation", {"pairs": [repr(t) for t in bad[:5]]})
        bad = self.square_zero_failures()
        if bad:
            raise DifferentialNotSquareZero("d^2 != 0 on the algebra", {"labels": [repr(t) for t in bad[:5]]})
        return True

    def as_complex(self) -> ChainComplex:
        basis: Dict[int, List[Label]] = {}
        for a in self.basis():
            basis.setdefault(self.degree(a), []).append(a)
        return ChainComplex.from_operator(basis, self.d, self.domain, name=self.name)

    @classmethod
    def ground(cls, domain) -> "DGAlgebra":
        return cls({}, {}, {}, domain, name="k")

    def __repr__(self):
        return f"<DGAlgebra {self.name} dim={len(self.labels) + 1} over {self.domain}>"


def enveloping_algebra(A: DGAlgebra) -> DGAlgebra:
    """
    A^e = A (x) A^op with (a (x) b)(a' (x) b') = (-1)^{|b||a'| + |b||b'|} aa' (x) b'b.

    Labels are pairs (a, b) of A-basis labels; the pair (ONE, ONE) is the unit.
    """
    K = A.domain
    basis = A.basis()
    pairs = [(a, b) for a in basis for b in basis if (a, b) != (ONE, ONE)]
    degrees = {p: A.degree(p[0]) + A.degree(p[1]) for p in pairs}

    def as_label(a, b):
        return ONE if (a, b) == (ONE, ONE) else (a, b)

    product: Dict[Tuple, Lin] = {}
    for (a, b) in pairs:
        for (a2, b2) in pairs:
            eps = sign(K, A.degree(b) * A.degree(a2) + A.degree(b) * A.degree(b2))
            out: Lin = {}
            for x, u in A.mul(a, a2).items():
                for y, v in A.mul(b2, b).items():
                    lin_add(out, eps * u * v, {as_label(x, y): K.one})
            if out:
                product[((a, b), (a2, b2))] = out

    differential: Dict[Label, Lin] = {}
    for (a, b) in pairs:
        out: Lin = {}
        for x, u in A.d(a).items():
            lin_add(out, u, {as_label(x, b): K.one})
        for y, v in A.d(b).items():
            lin_add(out, sign(K, A.degree(a)) * v, {as_label(a, y): K.one})
        differential[(a, b)] = out
    return DGAlgebra(degrees, product, differential, K, name=f"{A.name}^e")


# ── Twisting cochains ───────────────────────────────────────────


class TwistingCochain:
    """
    Degree -1 map tau: C-bar -> A given on basis labels.

    Parameters:
        source: DGCoalgebra
        target: algebra-like object (DGAlgebra, CobarAlgebra)
        tau:    callable label -> {algebra label: coeff}
    """

    def __init__(self, source: DGCoalgebra, target, tau: Callable[[Label], Lin], name: str = "tau"):
        self.source = source
        self.target = target
        self._tau = tau
        self.name = name

    def __call__(self, c: Label) -> Lin:
        if c == ONE:
            return {}
        return self._tau(c)

    def mc_residual(self, c: Label) -> Lin:
        """d_A tau(c) + tau(dc) + sum (-1)^{|c'|} tau(c') tau(c'') + h(c) ONE."""
        C, A = self.source, self.target
        K = C.domain
        res: Lin = {}
        for a, v in self(c).items():
            lin_add(res, v, A.d(a))
        for e, v in C.d(c).items():
            lin_add(res, v, self(e))
        for (c1, c2), v in C.reduced_coproduct(c).items():
            left, right = self(c1), self(c2)
            if not left or not right:
                continue
            eps = sign(K, C.degree(c1))
            for a, u in left.items():
                for b, w in right.items():
                    lin_add(res, eps * v * u * w, A.mul(a, b))
        if C.h(c):
            lin_add(res, C.h(c), {ONE: K.one})
        return res

    def mc_failures(self, max_weight: Optional[int] = None) -> List[Label]:
        return [c for c in self.source.labels
                if (max_weight is None or self.source.weight(c) <= max_weight) and self.mc_residual(c)]

    def require_mc(self, max_weight: Optional[int] = None):
        bad = self.mc_failures(max_weight)
        if bad:
            raise MaurerCartanViolated("Maurer-Cartan equation fails",
                                       {"labels": [repr(b) for b in bad[:5]], "tau": self.name})


def check_mc(tau: TwistingCochain, max_weight: Optional[int] = None) -> bool:
    """True iff the Maurer-Cartan identity holds on every basis element (within the truncation)."""
    return not tau.mc_failures(max_weight)


def require_mc(tau: TwistingCochain, max_weight: Optional[int] = None):
    tau.require_mc(max_weight)


# ── Comodules ───────────────────────────────────────────────────


class DGComodule:
    """
    Finite-rank dg comodule over C with reduced coactions.

    Parameters:
        coalgebra:    the DGCoalgebra C
        degrees:      {label: degree}
        differential: {label: {label: coeff}}
        left:         {label: {(c, m): coeff}}  c in C-bar (None for right-only)
        right:        {label: {(m, c): coeff}}  c in C-bar (None for left-only)
        weights:      {label: weight}, default 0
        finite_rank:  False when the labels only truncate an infinite-rank comodule
    """

    def __init__(self, coalgebra: DGCoalgebra, degrees: Dict[Label, int], differential: Dict[Label, Lin],
                 left: Optional[Dict[Label, Lin]] = None, right: Optional[Dict[Label, Lin]] = None,
                 weights: Optional[Dict[Label, int]] = None, name: str = "",
                 profile: Optional[Callable[[int], Profile]] = None, finite_rank: bool = True):
        self.finite_rank = finite_rank
        self.coalgebra = coalgebra
        self.domain = coalgebra.domain
        self.labels: List[Label] = list(degrees)
        self._degrees = dict(degrees)
        self._differential = {m: {k: v for k, v in differential.get(m, {}).items() if v} for m in self.labels}
        self._left = None if left is None else {m: {k: v for k, v in left.get(m, {}).items() if v}
                                                 for m in self.labels}
        self._right = None if right is None else {m: {k: v for k, v in right.get(m, {}).items() if v}
                                                   for m in self.labels}
        self._weights = dict(weights or {})
        self.name = name
        self._profile = profile

    @property
    def is_left(self) -> bool:
        return self._left is not None

    @property
    def is_right(self) -> bool:
        return self._right is not None

    def degree(self, m: Label) -> int:
        return self._degrees[m]

    def weight(self, m: Label) -> int:
        return self._weights.get(m, 0)

    def d(self, m: Label) -> Lin:
        return self._differential[m]

    def left_coaction(self, m: Label) -> Lin:
        return {} if self._left is None else self._left[m]

    def right_coaction(self, m: Label) -> Lin:
        return {} if self._right is None else self._right[m]

    def labels_by_weight(self, cap: int) -> List[Label]:
        return [m for m in self.labels if self.weight(m) <= cap]

    def min_weight(self) -> int:
        return min((self.weight(m) for m in self.labels), default=0)

    def weight_counts(self, cap: int) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for m in self.labels:
            w = self.weight(m)
            if w <= cap:
                counts[w] = counts.get(w, 0) + 1
        return counts

    def degree_profile(self, max_degree: int) -> Profile:
        if self._profile is not None:
            return self._profile(max_degree)
        return profile_of(self.labels, self.degree, self.weight)

    # ── constructors ──

    @classmethod
    def regular(cls, C: DGCoalgebra) -> "DGComodule":
        """C as a bicomodule over itself."""
        one = C.domain.one
        left, right = {}, {}
        for c in C.basis():
            if c == ONE:
                left[c], right[c] = {}, {}
                continue
            lft = {(c, ONE): one}
            lin_add(lft, one, C.reduced_coproduct(c))
            rgt = {(ONE, c): one}
            lin_add(rgt, one, C.reduced_coproduct(c))
            left[c], right[c] = lft, rgt
        degrees = {c: C.degree(c) for c in C.basis()}
        weights = {c: C.weight(c) for c in C.basis()}
        differential = {c: C.d(c) for c in C.basis()}
        return cls(C, degrees, differential, left=left, right=right, weights=weights,
                   name=C.name, profile=C.degree_profile, finite_rank=not C.is_truncation)

    @classmethod
    def trivial(cls, C: DGCoalgebra) -> "DGComodule":
        """The ground field with zero reduced coactions on both sides."""
        return cls(C, {ONE: 0}, {ONE: {}}, left={ONE: {}}, right={ONE: {}}, name="k")

    def dual(self) -> "DGComodule":
        """
        Linear dual E* with labels ("*", e).

        The left coaction of E* comes from the right coaction of E and the
        right coaction of E* from the left coaction of E:
            rho_L(xi) = sum xi(e0) c (x) e*                 for rho_R(e) = e0 (x) c
            rho_R(xi) = sum (-1)^{|c|} xi(e0) e* (x) c      for rho_L(e) = c (x) e0
        and d(xi) = -(-1)^{|xi|} xi o d.
        """
        K = self.domain
        C = self.coalgebra
        star = lambda m: ("*", m)  # noqa: E731
        degrees = {star(m): -self.degree(m) for m in self.labels}
        weights = {star(m): -self.weight(m) for m in self.labels}
        differential: Dict[Label, Lin] = {star(m): {} for m in self.labels}
        for e in self.labels:
            for m, v in self.d(e).items():
                coeff = -sign(K, -self.degree(m)) * v
                lin_add(differential[star(m)], coeff, {star(e): K.one})
        left = None
        if self._right is not None:
            left = {star(m): {} for m in self.labels}
            for e in self.labels:
                for (e0, c), v in self.right_coaction(e).items():
                    lin_add(left[star(e0)], v, {(c, star(e)): K.one})
        right = None
        if self._left is not None:
            right = {star(m): {} for m in self.labels}
            for e in self.labels:
                for (c, e0), v in self.left_coaction(e).items():
                    lin_add(right[star(e0)], sign(K, C.degree(c)) * v, {(star(e), c): K.one})
        return DGComodule(C, degrees, differential, left=left, right=right, weights=weights,
                          name=f"{self.name}*", finite_rank=self.finite_rank)

    # ── axioms ──

    def counit_failures(self) -> List[str]:
        """
        Labels whose reduced coaction breaks the counit axiom.

        The full coaction is 1 (x) m + rho_L(m), so (eps (x) id) returns m
        exactly when every term of rho_L(m) has its coalgebra factor in C-bar
        (likewise on the right). Terms must also land in the module basis
        and preserve degree.
        """
        C = self.coalgebra
        bar_labels = set(C.labels)
        known = set(self.labels)
        bad: List[str] = []
        for m in self.labels:
            terms = []
            if self._left is not None:
                terms += [(c, m0) for (c, m0) in self.left_coaction(m)]
            if self._right is not None:
                terms += [(c, m0) for (m0, c) in self.right_coaction(m)]
            for c, m0 in terms:
                if c not in bar_labels or m0 not in known:
                    bad.append(f"counit at {m!r}")
                    break
                if C.degree(c) + self.degree(m0) != self.degree(m):
                    bad.append(f"coaction degree at {m!r}")
                    break
        return bad

    def verify(self):
        """Counit, coassociativity of both coactions, bicomodule compatibility, d^2 = 0, compatibility with d."""
        K, C = self.domain, self.coalgebra
        bad = self.counit_failures()
        if bad:
            raise NotCoassociative("Comodule axioms fail", {"failures": bad[:5], "comodule": self.name})
        for m in self.labels:
            dd: Lin = {}
            for e, v in self.d(m).items():
                lin_add(dd, v, self.d(e))
            if dd:
                bad.append(f"d^2 at {m!r}")
            if self._left is not None:
                lhs: Lin = {}
                rhs: Lin = {}
                for (c, m0), v in self.left_coaction(m).items():
                    for (c1, c2), w in C.reduced_coproduct(c).items():
                        lin_add(lhs, v * w, {(c1, c2, m0): K.one})
                    for (c2, m1), w in self.left_coaction(m0).items():
                        lin_add(rhs, v * w, {(c, c2, m1): K.one})
                if lhs != rhs:
                    bad.append(f"left coassociativity at {m!r}")
                got: Lin = {}
                for e, v in self.d(m).items():
                    lin_add(got, v, self.left_coaction(e))
                want: Lin = {}
                for (c, m0), v in self.left_coaction(m).items():
                    for e, w in C.d(c).items():
                        lin_add(want, v * w, {(e, m0): K.one})
                    for e, w in self.d(m0).items():
                        lin_add(want, sign(K, C.degree(c)) * v * w, {(c, e): K.one})
                if got != want:
                    bad.append(f"left coaction vs d at {m!r}")
            if self._right is not None:
                lhs, rhs = {}, {}
                for (m0, c), v in self.right_coaction(m).items():
                    for (c1, c2), w in C.reduced_coproduct(c).items():
                        lin_add(lhs, v * w, {(m0, c1, c2): K.one})
                    for (m1, c1), w in self.right_coaction(m0).items():
                        lin_add(rhs, v * w, {(m1, c1, c): K.one})
                if lhs != rhs:
                    bad.append(f"right coassociativity at {m!r}")
                got, want = {}, {}
                for e, v in self.d(m).items():
                    lin_add(got, v, self.right_coaction(e))
                for (m0, c), v in self.right_coaction(m).items():
                    for e, w in self.d(m0).items():
                        lin_add(want, v * w, {(e, c): K.one})
                    for e, w in C.d(c).items():
                        lin_add(want, sign(K, self.degree(m0)) * v * w, {(m0, e): K.one})
                if got != want:
                    bad.append(f"right coaction vs d at {m!r}")
            if self._left is not None and self._right is not None:
                lhs, rhs = {}, {}
                for (m0, c), v in self.right_coaction(m).items():
                    for (c1, m1), w in self.left_coaction(m0).items():
                        lin_add(lhs, v * w, {(c1, m1, c): K.one})
                for (c1, m0), v in self.left_coaction(m).items():
                    for (m1, c), w in self.right_coaction(m0).items():
                        lin_add(rhs, v * w, {(c1, m1, c): K.one})
                if lhs != rhs:
                    bad.append(f"bicomodule compatibility at {m!r}")
        if bad:
            raise NotCoassociative("Comodule axioms fail", {"failures": bad[:5], "comodule": self.name})
        return True

    def as_complex(self) -> ChainComplex:
        basis: Dict[int, List[Label]] = {}
        for m in self.labels:
            basis.setdefault(self.degree(m), []).append(m)
        return ChainComplex.from_operator(basis, self.d, self.domain, name=self.name)

    def __repr__(self):
        return f"<DGComodule {self.name} rank={len(self.labels)}>"


def comodule_map_failures(M: DGComodule, N: DGComodule, f: Callable[[Label], Lin], degree: int,
                          side: str = "left") -> List[Label]:
    """
    Labels m of M where the degree-k map f fails to commute with the coactions:

        left:  rho_L(f(m)) = sum (-1)^{k|c|} c (x) f(m0)    for rho_L(m) = c (x) m0
        right: rho_R(f(m)) = sum f(m0) (x) c                for rho_R(m) = m0 (x) c
    """
    K, C = M.domain, M.coalgebra
    bad = []
    for m in M.labels:
        lhs: Lin = {}
        rhs: Lin = {}
        if side == "left":
            for x, v in f(m).items():
                lin_add(lhs, v, N.left_coaction(x))
            for (c, m0), v in M.left_coaction(m).items():
                eps = sign(K, degree * C.degree(c))
                for x, w in f(m0).items():
                    lin_add(rhs, eps * v * w, {(c, x): K.one})
        else:
            for x, v in f(m).items():
                lin_add(lhs, v, N.right_coaction(x))
            for (m0, c), v in M.right_coaction(m).items():
                for x, w in f(m0).items():
                    lin_add(rhs, v * w, {(x, c): K.one})
        if lhs != rhs:
            bad.append(m)
    return bad


# ── Modules ─────────────────────────────────────────────────────


class DGModule:
    """
    Module over an algebra-like object, used as a tensor factor.

    Subclasses provide the basis enumeration by weight and the actions;
    `left_act(a, m)` and `right_act(m, a)` return linear combinations.
    """

    algebra = None
    name = "M"
    weighted = True

    def degree(self, m: Label) -> int:
        raise NotImplementedError

    def weight(self, m: Label) -> int:
        raise NotImplementedError

    def d(self, m: Label) -> Lin:
        raise NotImplementedError

    def left_act(self, a: Label, m: Label) -> Lin:
        raise NotImplementedError

    def right_act(self, m: Label, a: Label) -> Lin:
        raise NotImplementedError

    def labels_by_weight(self, cap: int) -> List[Label]:
        raise NotImplementedError

    def min_weight(self) -> int:
        return 0

    def weight_counts(self, cap: int) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for m in self.labels_by_weight(cap):
            w = self.weight(m)
            counts[w] = counts.get(w, 0) + 1
        return counts

    def degree_profile(self, max_degree: int) -> Profile:
        raise NotImplementedError

    def action_failures(self, cap: int) -> List[str]:
        """Associativity and Leibniz of both actions on basis elements up to the weight cap."""
        A = self.algebra
        K = A.domain
        bad = []
        alg = [a for a in A.labels_by_weight(cap) if a != ONE]
        for m in self.labels_by_weight(cap):
            for a in alg:
                got: Lin = {}
                for x, v in self.left_act(a, m).items():
                    lin_add(got, v, self.d(x))
                want: Lin = {}
                for e, v in A.d(a).items():
                    lin_add(want, v, self.left_act(e, m))
                for x, v in self.d(m).items():
                    lin_add(want, sign(K, A.degree(a)) * v, self.left_act(a, x))
                if got != want:
                    bad.append(f"left Leibniz {a!r}.{m!r}")
                for b in alg:
                    lhs: Lin = {}
                    for ab, v in A.mul(a, b).items():
                        lin_add(lhs, v, self.left_act(ab, m))
                    rhs: Lin = {}
                    for x, v in self.left_act(b, m).items():
                        lin_add(rhs, v, self.left_act(a, x))
                    if lhs != rhs:
                        bad.append(f"left associativity {a!r},{b!r},{m!r}")
        return bad


class RegularModule(DGModule):
    """
    An algebra as a bimodule over itself.

    With weighted=False every label has weight 0 (finite algebras only),
    which suits bar-length filtrations.
    """

    def __init__(self, algebra, weighted: bool = True):
        self.algebra = algebra
        self.name = getattr(algebra, "name", "A")
        self.weighted = weighted

    def degree(self, m):
        return self.algebra.degree(m)

    def weight(self, m):
        return self.algebra.weight(m) if self.weighted else 0

    def d(self, m):
        return self.algebra.d(m)

    def left_act(self, a, m):
        return self.algebra.mul(a, m)

    def right_act(self, m, a):
        return self.algebra.mul(m, a)

    def labels_by_weight(self, cap):
        if not self.weighted:
            return self.algebra.basis() if cap >= 0 else []
        return self.algebra.labels_by_weight(cap)

    def weight_counts(self, cap):
        if not self.weighted:
            return {0: len(self.algebra.basis())} if cap >= 0 else {}
        counts = self.algebra.weight_counts(cap)
        return {w: n for w, n in enumerate(counts) if n}

    def degree_profile(self, max_degree):
        if not self.weighted:
            return profile_of(self.algebra.basis(), self.degree, self.weight)
        return self.algebra.degree_profile(max_degree)


class TrivialModule(DGModule):
    """The ground field with A-bar acting by zero on both sides."""

    def __init__(self, algebra):
        self.algebra = algebra
        self.name = "k"

    def degree(self, m):
        return 0

    def weight(self, m):
        return 0

    def d(self, m):
        return {}

    def left_act(self, a, m):
        return {m: self.algebra.domain.one} if a == ONE else {}

    def right_act(self, m, a):
        return {m: self.algebra.domain.one} if a == ONE else {}

    def labels_by_weight(self, cap):
        return [ONE] if cap >= 0 else []

    def degree_profile(self, max_degree):
        return {0: 0}


class DualModule(DGModule):
    """
    Linear dual A* of a finite algebra, labels ("*", a), as an A-bimodule:

        (a . xi)(x) = (-1)^{|a|(|xi| + |x|)} xi(x a)
        (xi . b)(x) = xi(b x)
        d xi        = -(-1)^{|xi|} xi o d

    With weighted=False every label has weight 0, which suits bar-length
    filtrations.
    """

    def __init__(self, algebra: DGAlgebra, weighted: bool = True):
        self.algebra = algebra
        self.name = f"{algebra.name}*"
        self.weighted = weighted
        K = algebra.domain
        self._labels = [("*", a) for a in algebra.basis()]
        self._d: Dict[Label, Lin] = {lab: {} for lab in self._labels}
        for x in algebra.basis():
            for a, v in algebra.d(x).items():
                coeff = -sign(K, -algebra.degree(a)) * v
                lin_add(self._d[("*", a)], coeff, {("*", x): K.one})

    def degree(self, m):
        return -self.algebra.degree(m[1])

    def weight(self, m):
        return -self.algebra.weight(m[1]) if self.weighted else 0

    def d(self, m):
        return self._d[m]

    def left_act(self, a, m):
        A, K = self.algebra, self.algebra.domain
        if a == ONE:
            return {m: K.one}
        target = m[1]
        out: Lin = {}
        for x in A.basis():
            coeff = A.mul(x, a).get(target)
            if coeff:
                eps = sign(K, A.degree(a) * (self.degree(m) + A.degree(x)))
                lin_add(out, eps * coeff, {("*", x): K.one})
        return out

    def right_act(self, m, b):
        A, K = self.algebra, self.algebra.domain
        if b == ONE:
            return {m: K.one}
        target = m[1]
        out: Lin = {}
        for x in A.basis():
            coeff = A.mul(b, x).get(target)
            if coeff:
                lin_add(out, coeff, {("*", x): K.one})
        return out

    def labels_by_weight(self, cap):
        return [m for m in self._labels if self.weight(m) <= cap]

    def min_weight(self):
        return min((self.weight(m) for m in self._labels), default=0)

    def degree_profile(self, max_degree):
        return profile_of(self._labels, self.degree, self.weight)
