"""
Mixed complexes: Hochschild and coHochschild complexes with Connes' operator.

coHochschild complex of a coalgebra C, basis c (x) w with c in C and w a
cobar word, weight l(c) + wt(w):

    b(c (x) w) = dc (x) w + (-1)^{|c|} c (x) dw
               + sum (-1)^{|c1|} c1 (x) [c2] w                  (c2 != ONE)
               + sum k c2 (x) w [c1]                            (c1 != ONE)
    k = -(-1)^{|c||w| + |w| + |c2|(|w| + |c1| + 1)}
    B(ONE (x) [c1|...|cn]) = sum_i (-1)^{E<i * E>=i} ci (x) [c_{i+1}|...|cn|c1|...|c_{i-1}]
    B(c (x) w) = 0 for c in C-bar

Hochschild complex of an algebra A uses the same b with the bar coalgebra
in the first slot and the projection [a] -> a as twisting cochain, and
    B(w (x) a0) = (-1)^{|a0||w|} sum over rotations of [a0|w] (x) ONE
with the Koszul sign of the suspended letters.

B raises degree by one. Negative cyclic chains are sums x u^i in degree
|x| - 2i with differential b + uB; cyclic chains are x u^{-i} in degree
|x| + 2i. Both are truncated at u-power N.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from exceptions import GradingMismatch, NotACycle, WindowNotTrusted
from homology.complexes import ChainComplex, HomologyTable, Window, homology, homology_class
from koszul.barcobar import CobarAlgebra
from koszul.dgstruct import ONE, DGCoalgebra, Label, Lin, combine_profiles, lin_add
from linalg.domains import sign
from linalg.elimination import solve
from linalg.sparse import SparseMatrix
from models.report import Verdict

logger = logging.getLogger(__name__)


class MixedComplex:
    """
    Chain complex (C, b) with a degree +1 operator B.

    Built from operators on basis labels; `B_matrix(n)` maps degree n to
    degree n + 1.
    """

    def __init__(self, basis: Dict[int, List[Label]], b: Callable[[Label], Lin], B: Callable[[Label], Lin],
                 domain, complete: Callable[[int], bool], name: str = ""):
        self.b_op = b
        self.B_op = B
        self.domain = domain
        self.name = name
        self.complex = ChainComplex.from_operator(basis, b, domain, complete=complete, name=name)
        self._B: Dict[int, SparseMatrix] = {}

    @property
    def module(self):
        return self.complex.module

    def B_matrix(self, n: int) -> SparseMatrix:
        if n in self._B:
            return self._B[n]
        mod = self.module
        target = mod.index(n + 1)
        rows: Dict[int, Dict[int, Any]] = {}
        if mod.dim(n + 1):
            for j, lab in enumerate(mod.labels(n)):
                for tgt, c in self.B_op(lab).items():
                    i = target.get(tgt)
                    if i is None:
                        raise GradingMismatch("B leaves the basis", {"degree": n, "source": repr(lab)})
                    rows.setdefault(i, {})[j] = c
        mat = SparseMatrix(rows, (mod.dim(n + 1), mod.dim(n)), self.domain)
        self._B[n] = mat
        return mat

    def failures(self) -> List[str]:
        """Degrees where b^2, B^2 or bB + Bb is nonzero."""
        C = self.complex
        bad: List[str] = []
        degrees = C.degrees()
        if not degrees:
            return bad
        lo, hi = degrees[0], degrees[-1]
        for n in degrees:
            if C.dim(n - 2) and not (C.d(n - 1) @ C.d(n)).is_zero():
                bad.append(f"b^2 at {n}")
            if n + 2 <= hi and not (self.B_matrix(n + 1) @ self.B_matrix(n)).is_zero():
                bad.append(f"B^2 at {n}")
            if lo < n < hi:
                both = C.d(n + 1) @ self.B_matrix(n) + self.B_matrix(n - 1) @ C.d(n)
                if not both.is_zero():
                    bad.append(f"bB+Bb at {n}")
        return bad

    def hochschild_homology(self, window: Window) -> HomologyTable:
        return homology(self.complex, window)

    # ── cyclic variants ──

    def negative_cyclic(self, N: int, window: Window) -> ChainComplex:
        """Sum x u^i (0 <= i < N) in degree |x| - 2i, differential b + uB."""
        K = self.domain
        lo, hi = window[0] - 1, window[1] + 1
        basis: Dict[int, List[Tuple]] = {}
        for i in range(N):
            for n in range(lo, hi + 1):
                for x in self.module.labels(n + 2 * i):
                    basis.setdefault(n, []).append((x, i))

        def d(lab) -> Lin:
            x, i = lab
            out: Lin = {}
            for y, v in self.b_op(x).items():
                lin_add(out, v, {(y, i): K.one})
            if i + 1 < N:
                for y, v in self.B_op(x).items():
                    lin_add(out, v, {(y, i + 1): K.one})
            return out

        base = self.complex

        def complete(n: int) -> bool:
            return all(base.complete(n + 2 * i) for i in range(N))

        return ChainComplex.from_operator(basis, d, K, complete=complete, name=f"HN({self.name})")

    def cyclic(self, N: int, window: Window) -> ChainComplex:
        """Sum x u^{-i} (0 <= i < N) in degree |x| + 2i, differential b + uB."""
        K = self.domain
        lo, hi = window[0] - 1, window[1] + 1
        basis: Dict[int, List[Tuple]] = {}
        for i in range(N):
            for n in range(lo, hi + 1):
                for x in self.module.labels(n - 2 * i):
                    basis.setdefault(n, []).append((x, i))

        def d(lab) -> Lin:
            x, i = lab
            out: Lin = {}
            for y, v in self.b_op(x).items():
                lin_add(out, v, {(y, i): K.one})
            if i >= 1:
                for y, v in self.B_op(x).items():
                    lin_add(out, v, {(y, i - 1): K.one})
            return out

        base = self.complex

        def complete(n: int) -> bool:
            return all(base.complete(n - 2 * i) for i in range(N))

        return ChainComplex.from_operator(basis, d, K, complete=complete, name=f"HC({self.name})")


def _range_for_cyclic(window: Window, N: int) -> Window:
    return window[0] - 1 - 2 * N, window[1] + 1 + 2 * N


# ── coHochschild ────────────────────────────────────────────────


def cohochschild_complex(C: DGCoalgebra, cap: int, window: Window, N: int = 0) -> MixedComplex:
    """
    coCH(C) truncated at weight cap.

    The basis covers window-1 .. window+1, widened by 2N on both sides so
    the u-truncated cyclic complexes of depth N can be built from it.
    """
    if window[0] > window[1]:
        raise WindowNotTrusted("Empty window", {"window": window})
    K = C.domain
    Om = CobarAlgebra(C, None)
    lo, hi = _range_for_cyclic(window, N) if N else (window[0] - 1, window[1] + 1)
    basis: Dict[int, List[Tuple]] = {}
    for c in C.basis():
        budget = cap - C.weight(c)
        for w in Om.labels_by_weight(budget):
            n = C.degree(c) + Om.degree(w)
            if lo <= n <= hi:
                basis.setdefault(n, []).append((c, w))

    def letter_degree(c):
        return C.degree(c) - 1

    def b(lab) -> Lin:
        c, w = lab
        dc, dw = C.degree(c), Om.degree(w)
        out: Lin = {}
        for e, v in C.d(c).items():
            lin_add(out, v, {(e, w): K.one})
        ec = sign(K, dc)
        for w2, v in Om.d(w).items():
            lin_add(out, ec * v, {(c, w2): K.one})
        for (c1, c2), v in C.coproduct(c).items():
            if c2 != ONE:
                lin_add(out, sign(K, C.degree(c1)) * v, {(c1, (c2,) + w): K.one})
            if c1 != ONE:
                d1, d2 = C.degree(c1), C.degree(c2)
                kappa = -sign(K, dc * dw + dw + d2 * (dw + d1 + 1))
                lin_add(out, kappa * v, {(c2, w + (c1,)): K.one})
        return out

    def B(lab) -> Lin:
        c, w = lab
        if c != ONE or not w:
            return {}
        degs = [letter_degree(x) for x in w]
        total = sum(degs)
        out: Lin = {}
        before = 0
        for i, x in enumerate(w):
            eps = sign(K, before * (total - before))
            lin_add(out, eps, {(x, w[i + 1:] + w[:i]): K.one})
            before += degs[i]
        return out

    prof_fn = lambda m: combine_profiles([C.degree_profile(m), Om.degree_profile(m + 1)])  # noqa: E731
    complete = _completeness_from(prof_fn, cap, C)
    mixed = MixedComplex(basis, b, B, K, complete, name=f"coCH({C.name})")
    logger.debug("coCH(%s) at cap %d: dims %s", C.name, cap, {n: len(v) for n, v in basis.items()})
    return mixed


def _completeness_from(prof_fn, cap: int, C: DGCoalgebra) -> Callable[[int], bool]:
    shift = max(0, -min((C.degree(c) for c in C.basis()), default=0))

    def complete(n: int) -> bool:
        prof = prof_fn(max(n, 0) + shift)
        if prof is None:
            return False
        return prof.get(n, cap) <= cap

    return complete


# ── Hochschild ──────────────────────────────────────────────────


def _bar_words(letters: List[Tuple[Label, int]], cap: int) -> List[Tuple[Tuple, int]]:
    """Bar words over weighted letters with total weight <= cap, including the empty word."""
    out: List[Tuple[Tuple, int]] = [((), 0)]
    layer = [((), 0)]
    while layer:
        nxt = []
        for w, wt in layer:
            for a, wa in letters:
                if wt + wa <= cap:
                    nxt.append((w + (a,), wt + wa))
        out.extend(nxt)
        layer = nxt
    return out


def hochschild_complex(A, cap: int, window: Window, N: int = 0) -> MixedComplex:
    """
    CH(A) = B(A) (x) A truncated at weight cap, for a finite DGAlgebra or a
    CobarAlgebra. Letters of weight 0 are not allowed.
    """
    if window[0] > window[1]:
        raise WindowNotTrusted("Empty window", {"window": window})
    K = A.domain
    lo, hi = _range_for_cyclic(window, N) if N else (window[0] - 1, window[1] + 1)
    letters = [(a, A.weight(a)) for a in A.labels_by_weight(cap) if a != ONE]
    if any(wa <= 0 for _, wa in letters):
        raise GradingMismatch("Hochschild truncation needs positive letter weights", {"algebra": A.name})
    letter_deg = {a: A.degree(a) + 1 for a, _ in letters}
    basis: Dict[int, List[Tuple]] = {}
    for w, wt in _bar_words(letters, cap):
        dw = sum(letter_deg[a] for a in w)
        for a in A.labels_by_weight(cap - wt):
            n = dw + A.degree(a)
            if lo <= n <= hi:
                basis.setdefault(n, []).append((w, a))

    def ldeg(a) -> int:
        return A.degree(a) + 1

    def bar_d(w) -> Lin:
        out: Lin = {}
        eps = 0
        for i, a in enumerate(w):
            for e, v in A.d(a).items():
                lin_add(out, -sign(K, eps) * v, {w[:i] + (e,) + w[i + 1:]: K.one})
            eps += ldeg(a)
            if i + 1 < len(w):
                for e, v in A.mul(a, w[i + 1]).items():
                    lin_add(out, -sign(K, eps) * v, {w[:i] + (e,) + w[i + 2:]: K.one})
        return out

    def b(lab) -> Lin:
        w, a = lab
        dw = sum(ldeg(x) for x in w)
        da = A.degree(a)
        out: Lin = {}
        for w2, v in bar_d(w).items():
            lin_add(out, v, {(w2, a): K.one})
        ew = sign(K, dw)
        for a2, v in A.d(a).items():
            lin_add(out, ew * v, {(w, a2): K.one})
        if w:
            head, last = w[:-1], w[-1]
            d1 = dw - ldeg(last)
            for a2, v in A.mul(last, a).items():
                lin_add(out, sign(K, d1) * v, {(head, a2): K.one})
            first, tail = w[0], w[1:]
            d1, d2 = ldeg(first), dw - ldeg(first)
            kappa = -sign(K, dw * da + da + d2 * (da + d1 + 1))
            for a2, v in A.mul(a, first).items():
                lin_add(out, kappa * v, {(tail, a2): K.one})
        return out

    def B(lab) -> Lin:
        w, a0 = lab
        if a0 == ONE:
            return {}
        word = (a0,) + w
        degs = [ldeg(x) for x in word]
        total = sum(degs)
        pre = sign(K, A.degree(a0) * sum(ldeg(x) for x in w))
        out: Lin = {}
        before = 0
        for j in range(len(word)):
            eps = sign(K, before * (total - before))
            lin_add(out, pre * eps, {(word[j:] + word[:j], ONE): K.one})
            before += degs[j]
        return out

    letter_profile = [(letter_deg[a], wa) for a, wa in letters]

    def prof_fn(m: int):
        if any(dg <= 0 for dg, _ in letter_profile):
            return None
        best: Dict[int, int] = {0: 0}
        for n in range(1, m + 1):
            cand = [best[n - dg] + wa for dg, wa in letter_profile if (n - dg) in best]
            if cand:
                best[n] = max(cand)
        return combine_profiles([best, A.degree_profile(m)])

    def complete(n: int) -> bool:
        if n < 0:
            return True
        prof = prof_fn(n)
        if prof is None:
            return False
        return prof.get(n, cap) <= cap

    return MixedComplex(basis, b, B, K, complete, name=f"CH({A.name})")


# ── Comparison and lifting ──────────────────────────────────────


@dataclass
class BettiComparison:
    """
    coHH(C) against HH(Omega C) over a window.

    Only trusted degrees are compared. A comparison with no trusted degree
    does not pass; its verdict is VERIFIED_FILTERED.
    """
    cohochschild: HomologyTable
    hochschild: HomologyTable
    trusted_degrees: List[int]
    mismatches: List[int] = field(default_factory=list)
    window: Window = (0, 0)

    @property
    def untrusted_degrees(self) -> List[int]:
        lo, hi = self.window
        return [n for n in range(lo, hi + 1) if n not in self.trusted_degrees]

    @property
    def passed(self) -> bool:
        return not self.mismatches and bool(self.trusted_degrees)

    @property
    def verdict(self) -> Verdict:
        if self.mismatches:
            return Verdict.FAILED
        if self.untrusted_degrees:
            return Verdict.VERIFIED_FILTERED
        return Verdict.VERIFIED

    def as_dict(self) -> Dict[str, Any]:
        return {
            "cohochschild": self.cohochschild.as_dict(),
            "hochschild": self.hochschild.as_dict(),
            "trusted_degrees": self.trusted_degrees,
            "untrusted_degrees": self.untrusted_degrees,
            "mismatches": self.mismatches,
            "passed": self.passed,
            "verdict": self.verdict.value,
        }


def betti_compare(C: DGCoalgebra, cap: int, window: Window) -> BettiComparison:
    """Ranks of coHH(C) and HH(Omega C) at the same truncation; mismatches counted on trusted degrees."""
    co = homology(cohochschild_complex(C, cap, window).complex, window)
    hh = homology(hochschild_complex(CobarAlgebra(C, None), cap, window).complex, window)
    trusted = [n for n in range(window[0], window[1] + 1)
               if co.groups[n].trusted and hh.groups[n].trusted]
    mismatches = [n for n in trusted if co.rank(n) != hh.rank(n)]
    logger.info("betti_compare %s cap=%d: coHH=%s HH=%s trusted=%s",
                C.name, cap, co.betti(), hh.betti(), trusted)
    if not trusted:
        logger.warning("betti_compare %s cap=%d: no trusted degree in %s", C.name, cap, window)
    return BettiComparison(co, hh, trusted, mismatches, window=window)


@dataclass
class LiftObstruction:
    """
    The class that stops a negative cyclic lift.

    At stage `stage` the cycle -B x_{stage-1} of degree `degree` is not a
    b-boundary; `coordinates` give its class in the H_degree basis whose
    representatives are `classes`.
    """
    stage: int
    degree: int
    cycle: Lin
    classes: List[Lin]
    coordinates: List[Any]


@dataclass
class NegativeCyclicLift:
    """Stages x_0 = z, x_1, ... with b x_{i+1} = -B x_i, or the obstruction that stopped them."""
    stages: List[Lin]
    degree: int
    obstruction: Optional[LiftObstruction] = None

    @property
    def obstruction_stage(self) -> Optional[int]:
        return None if self.obstruction is None else self.obstruction.stage

    @property
    def complete(self) -> bool:
        return self.obstruction is None


def _obstruction(C: ChainComplex, stage: int, n: int, rhs) -> LiftObstruction:
    # truncation can leave -B x off the cycles; no class is reported then
    reps, coords = homology_class(C, n, rhs) if C.is_cycle(n, rhs) else ([], [])
    return LiftObstruction(stage=stage, degree=n, cycle=C.module.combination(n, rhs),
                           classes=[C.module.combination(n, r) for r in reps], coordinates=coords)


def lift_to_negative_cyclic(M: MixedComplex, z: Lin, degree: int, N: int) -> NegativeCyclicLift:
    """
    Extend a b-cycle z of the given degree to sum x_i u^i with (b + uB) = 0
    modulo u^N.

    Raises:
        NotACycle: when b z != 0
    """
    C = M.complex
    vec = C.module.vector(degree, z)
    if not C.is_cycle(degree, vec):
        raise NotACycle("Element is not a b-cycle", {"degree": degree, "complex": M.name})
    stages: List[Lin] = [dict(z)]
    for i in range(N - 1):
        n = degree + 2 * i
        Bx = M.B_matrix(n).apply(C.module.vector(n, stages[-1])) if C.dim(n + 1) else {}
        if not Bx:
            stages.append({})
            continue
        rhs = {k: -v for k, v in Bx.items()}
        target_deg = n + 2
        x = solve(C.d(target_deg), rhs) if C.dim(target_deg) else None
        if x is None:
            obstruction = _obstruction(C, i + 1, n + 1, rhs)
            logger.info("lift of %s obstructed at stage %d: class %s in degree %d",
                        M.name, i + 1, obstruction.coordinates, n + 1)
            return NegativeCyclicLift(stages, degree, obstruction=obstruction)
        stages.append(C.module.combination(target_deg, x))
    return NegativeCyclicLift(stages, degree)
