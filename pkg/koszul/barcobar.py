"""
Cobar and bar constructions with their universal twisting cochains.

Cobar: words [c1|...|cn] in C-bar with letter degree |c|-1 and weight
sum l(ci), product by concatenation and

    d[c] = -[dc] - sum (-1)^{|c'|} [c'|c''] - h(c) []
    d[c1|...|cn] = sum_i (-1)^{E_i} [c1|...|c_{i-1}] d[ci] [c_{i+1}|...|cn]

with E_i the sum of the letter degrees before position i.

Bar: words [a1|...|ak] in A-bar with letter degree |a|+1, deconcatenation
coproduct and

    d[a1|...|ak] = - sum_i (-1)^{e_{i-1}} [..|da_i|..] - sum_i (-1)^{e_i} [..|a_i a_{i+1}|..]

with e_i = sum_{j<=i} (|a_j| + 1). The bar coalgebra is truncated at a
word length; the truncation is a sub dg coalgebra.
"""

import itertools
import logging
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from exceptions import GradingMismatch, WindowNotTrusted
from homology.complexes import ChainComplex, ChainMap, QuasiIsoCheck, Window, is_quasi_iso
from koszul.dgstruct import (
    ONE,
    DGAlgebra,
    DGCoalgebra,
    DGComodule,
    Label,
    Lin,
    Profile,
    RegularModule,
    TwistingCochain,
    completeness,
    lin_add,
)
from koszul.twisted import sandwich_module
from linalg.domains import sign

logger = logging.getLogger(__name__)

Word = Tuple[Label, ...]


def _max_plus_profile(letters: List[Tuple[int, int]], max_degree: int) -> Profile:
    """Max weight per degree of words in letters (degree, weight); None if some letter has degree <= 0."""
    if any(dg <= 0 for dg, _ in letters):
        return None
    best: Dict[int, int] = {0: 0}
    for n in range(1, max_degree + 1):
        cand = [best[n - dg] + w for dg, w in letters if (n - dg) in best]
        if cand:
            best[n] = max(cand)
    return best


# ── Cobar ───────────────────────────────────────────────────────


class CobarAlgebra:
    """
    Omega(C) truncated at weight `length_cap` (None for no truncation).

    Products whose weight exceeds the cap are zero. Labels are tuples of
    C-bar labels; the empty word is ONE.
    """

    def __init__(self, coalgebra: DGCoalgebra, length_cap: Optional[int]):
        self.coalgebra = coalgebra
        self.domain = coalgebra.domain
        self.cap = length_cap
        self.name = f"Omega({coalgebra.name})"
        self._letters = list(coalgebra.labels)
        self._letter_degree = {c: coalgebra.degree(c) - 1 for c in self._letters}
        self._letter_weight = {c: coalgebra.weight(c) for c in self._letters}
        self._words_cache: Dict[int, List[Word]] = {}
        self._d_cache: Dict[Word, Lin] = {}

    def uncapped(self) -> "CobarAlgebra":
        return CobarAlgebra(self.coalgebra, None)

    def degree(self, w: Word) -> int:
        return sum(self._letter_degree[c] for c in w)

    def weight(self, w: Word) -> int:
        return sum(self._letter_weight[c] for c in w)

    def mul(self, u: Word, v: Word) -> Lin:
        w = tuple(u) + tuple(v)
        if self.cap is not None and self.weight(w) > self.cap:
            return {}
        return {w: self.domain.one}

    def letter_d(self, c: Label) -> Lin:
        C, K = self.coalgebra, self.domain
        out: Lin = {}
        for e, v in C.d(c).items():
            lin_add(out, -v, {(e,): K.one})
        for (a, b), v in C.reduced_coproduct(c).items():
            lin_add(out, -sign(K, C.degree(a)) * v, {(a, b): K.one})
        if C.h(c):
            lin_add(out, -C.h(c), {ONE: K.one})
        return out

    def d(self, w: Word) -> Lin:
        if w in self._d_cache:
            return self._d_cache[w]
        K = self.domain
        out: Lin = {}
        before = 0
        for i, c in enumerate(w):
            eps = sign(K, before)
            head, tail = w[:i], w[i + 1:]
            for mid, v in self.letter_d(c).items():
                lin_add(out, eps * v, {head + mid + tail: K.one})
            before += self._letter_degree[c]
        self._d_cache[w] = out
        return out

    def _effective_cap(self, cap: int) -> int:
        return cap if self.cap is None else min(cap, self.cap)

    def labels_by_weight(self, cap: int) -> List[Word]:
        """All words of weight <= cap, by length then letter order."""
        cap = self._effective_cap(cap)
        if cap < 0:
            return []
        if cap in self._words_cache:
            return self._words_cache[cap]
        words: List[Word] = [ONE]
        layer: List[Tuple[Word, int]] = [(ONE, 0)]
        while layer:
            nxt = []
            for w, wt in layer:
                for c in self._letters:
                    nw = wt + self._letter_weight[c]
                    if nw <= cap:
                        nxt.append((w + (c,), nw))
            words.extend(w for w, _ in nxt)
            layer = nxt
        self._words_cache[cap] = words
        return words

    def min_weight(self) -> int:
        return 0

    def weight_counts(self, cap: int) -> List[int]:
        cap = self._effective_cap(cap)
        if cap < 0:
            return []
        counts = [0] * (cap + 1)
        counts[0] = 1
        for w in range(1, cap + 1):
            counts[w] = sum(counts[w - lw] for lw in self._letter_weight.values() if lw <= w)
        return counts

    def degree_profile(self, max_degree: int) -> Profile:
        letters = [(self._letter_degree[c], self._letter_weight[c]) for c in self._letters]
        return _max_plus_profile(letters, max_degree)

    def basis(self, degrees: Optional[Window] = None) -> Dict[int, List[Word]]:
        if self.cap is None:
            raise GradingMismatch("An uncapped cobar algebra has no finite basis", {"algebra": self.name})
        out: Dict[int, List[Word]] = {}
        for w in self.labels_by_weight(self.cap):
            n = self.degree(w)
            if degrees is None or degrees[0] <= n <= degrees[1]:
                out.setdefault(n, []).append(w)
        return out

    def as_complex(self, degrees: Optional[Window] = None) -> ChainComplex:
        return ChainComplex.from_operator(self.basis(degrees), self.d, self.domain,
                                          complete=self.completeness(), name=self.name)

    def completeness(self):
        cap = self.cap

        def complete(n: int) -> bool:
            return completeness(self.degree_profile(max(n, 0)), cap)(n)

        return complete

    def __repr__(self):
        return f"<CobarAlgebra {self.name} cap={self.cap}>"


def cobar(C: DGCoalgebra, length_cap: int) -> CobarAlgebra:
    """Omega(C) truncated at weight length_cap."""
    return CobarAlgebra(C, length_cap)


def universal_tau(C: DGCoalgebra, length_cap: Optional[int] = None) -> TwistingCochain:
    """tau(c) = [c] into Omega(C)."""
    Om = CobarAlgebra(C, length_cap)
    return TwistingCochain(C, Om, lambda c: {(c,): C.domain.one}, name="tau_Omega")


# ── Bar ─────────────────────────────────────────────────────────


def bar(A: DGAlgebra, length_cap: int) -> DGCoalgebra:
    """B(A) truncated at word length length_cap, as a DGCoalgebra with word labels.

    Raises:
        NotAugmented: when A has products or differentials that reach the unit
    """
    A.require_augmented()
    K = A.domain
    letters = list(A.labels)
    letter_degree = {a: A.degree(a) + 1 for a in letters}
    words: List[Word] = []
    for k in range(1, length_cap + 1):
        words.extend(itertools.product(letters, repeat=k))
    degrees = {w: sum(letter_degree[a] for a in w) for w in words}

    coproduct: Dict[Word, Lin] = {}
    for w in words:
        coproduct[w] = {(w[:i], w[i:]): K.one for i in range(1, len(w))}

    differential: Dict[Word, Lin] = {}
    for w in words:
        out: Lin = {}
        eps = 0
        for i, a in enumerate(w):
            for e, v in A.d(a).items():
                lin_add(out, -sign(K, eps) * v, {w[:i] + (e,) + w[i + 1:]: K.one})
            eps += letter_degree[a]
            if i + 1 < len(w):
                for e, v in A.mul(a, w[i + 1]).items():
                    lin_add(out, -sign(K, eps) * v, {w[:i] + (e,) + w[i + 2:]: K.one})
        differential[w] = out

    profile_letters = [(letter_degree[a], 1) for a in letters]

    @lru_cache(maxsize=None)
    def profile(max_degree: int) -> Profile:
        return _max_plus_profile(profile_letters, max_degree)

    return DGCoalgebra(degrees, coproduct, differential, K, name=f"B({A.name})", profile=profile)


def bar_tau(B: DGCoalgebra, A: DGAlgebra) -> TwistingCochain:
    """The projection [a] -> a, zero on longer words."""
    return TwistingCochain(B, A, lambda w: {w[0]: A.domain.one} if len(w) == 1 else {}, name="tau_B")


# ── Resolutions and opposites ───────────────────────────────────


def module_complex(M, cap: int, degrees: Window, name: str = "") -> ChainComplex:
    basis: Dict[int, List[Label]] = {}
    for m in M.labels_by_weight(cap):
        n = M.degree(m)
        if degrees[0] <= n <= degrees[1]:
            basis.setdefault(n, []).append(m)
    return ChainComplex.from_operator(basis, M.d, M.algebra.domain, name=name or M.name)


def counit_resolution(C: DGCoalgebra, M, cap: int, window: Window) -> Tuple[ChainMap, QuasiIsoCheck]:
    """
    Omega (x)^tau C (x)^tau M -> M induced by the counit of C, truncated at weight cap.

    Parameters:
        M: left module over Omega(C) (RegularModule or TrivialModule)

    Returns:
        (map, quasi-iso check over the window)

    Raises:
        WindowNotTrusted: when the truncation at cap cuts into the cone in the window
    """
    lo, hi = window
    if lo > hi:
        raise WindowNotTrusted("Empty window", {"window": window})
    tau = universal_tau(C)
    Om = RegularModule(tau.target)
    E = DGComodule.regular(C)
    degrees = (lo - 2, hi + 1)
    source = sandwich_module(Om, E, M, tau, cap, degrees, name=f"Omega(x){C.name}(x){M.name}")
    target = module_complex(M, cap, degrees)

    def eps(lab) -> Lin:
        p, e, q = lab
        if e != ONE:
            return {}
        return M.left_act(p, q)

    f = ChainMap.from_operator(source, target, 0, eps, name="counit")
    f.check()
    check = is_quasi_iso(f, window)
    if not check.definitive:
        raise WindowNotTrusted("Window exceeds the degrees trusted at this weight cap",
                               {"window": window, "cap": cap, "untrusted": check.untrusted})
    return f, check


def reverse_word(w: Word, letter_degree) -> Tuple[int, Word]:
    """s(w) = (-1)^{n + sum_{i<j} e_i e_j} reverse(w); returns (exponent parity, reversed word)."""
    degs = [letter_degree(c) for c in w]
    cross = 0
    total = 0
    for e in degs:
        cross += total * e
        total += e
    return (len(w) + cross) % 2, tuple(reversed(w))


def opposite_reversal_failures(C: DGCoalgebra, length_cap: int) -> List[str]:
    """
    Check that word reversal s: Omega(C^op) -> Omega(C)^op is a chain map
    and an algebra map on all words of weight <= length_cap.
    """
    K = C.domain
    Op = CobarAlgebra(C.opposite(), length_cap)
    Om = CobarAlgebra(C, length_cap)

    def letter_degree(c):
        return C.degree(c) - 1

    def s(x: Lin) -> Lin:
        out: Lin = {}
        for w, v in x.items():
            par, rw = reverse_word(w, letter_degree)
            lin_add(out, sign(K, par) * v, {rw: K.one})
        return out

    bad: List[str] = []
    words = Om.labels_by_weight(length_cap)
    for w in words:
        if s(Op.d(w)) != _d_lin(Om, s({w: K.one})):
            bad.append(f"d at {w!r}")
    for u in words:
        for v in words:
            if Om.weight(u) + Om.weight(v) > length_cap:
                continue
            left = s(Op.mul(u, v))
            right: Lin = {}
            su, sv = s({u: K.one}), s({v: K.one})
            koszul = sign(K, Om.degree(u) * Om.degree(v))
            for a, x in sv.items():
                for b, y in su.items():
                    lin_add(right, koszul * x * y, Om.mul(a, b))
            if left != right:
                bad.append(f"product at {u!r},{v!r}")
    return bad


def _d_lin(Om: CobarAlgebra, x: Lin) -> Lin:
    out: Lin = {}
    for w, v in x.items():
        lin_add(out, v, Om.d(w))
    return out
