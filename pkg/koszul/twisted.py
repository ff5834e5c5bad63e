"""
Twisted tensor products along a twisting cochain tau: C -> A.

Two three-factor shapes cover every construction in the package:

  comodule sandwich  X (x) P (x) Y   right comodule, bimodule, left comodule
      d = d_X + (-1)^{|x|} d_P + (-1)^{|x|+|p|} d_Y + T_L + T_R
      T_L(x p y) =  sum (-1)^{|x0|}   x0 (x) tau(c) p (x) y      rho_R(x) = x0 (x) c
      T_R(x p y) = -(-1)^{|x|+|p|} sum x (x) p tau(c) (x) y0      rho_L(y) = c (x) y0

  module sandwich    P (x) E (x) Q   right module, bicomodule, left module
      d = d_P + (-1)^{|p|} d_E + (-1)^{|p|+|e|} d_Q + T_L + T_R
      T_L(p e q) = -(-1)^{|p|} sum p tau(c) (x) e0 (x) q          rho_L(e) = c (x) e0
      T_R(p e q) =  (-1)^{|p|+|e0|} sum p (x) e0 (x) tau(c) q     rho_R(e) = e0 (x) c

One-sided products put the trivial module or comodule in an unused slot,
so their basis labels are triples with ONE in that slot.

Truncation keeps basis triples of total weight <= cap. Every summand of d
preserves or lowers total weight, so the truncation is a subcomplex.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from exceptions import GradingMismatch, InfiniteRankSource
from homology.complexes import ChainComplex, Window
from koszul.dgstruct import (
    DGComodule,
    Lin,
    Profile,
    RegularModule,
    TwistingCochain,
    combine_profiles,
    lin_add,
)
from linalg.domains import sign

logger = logging.getLogger(__name__)


def _min_degree(factor) -> Optional[int]:
    prof = factor.degree_profile(0)
    if prof is None:
        return None
    return min(prof, default=0)


def tensor_completeness(factors: Sequence, cap: int):
    """Predicate n -> True when every basis element of degree n has total weight <= cap."""
    shift = 0
    for f in factors:
        lo = _min_degree(f)
        if lo is None:
            return lambda _n: False
        shift += max(0, -lo)
    cache: Dict[int, Profile] = {}

    def complete(n: int) -> bool:
        if n not in cache:
            bound = n + shift
            cache[n] = combine_profiles(f.degree_profile(bound) for f in factors)
        prof = cache[n]
        if prof is None:
            return False
        return prof.get(n, cap) <= cap

    return complete


def tensor_basis_count(factors: Sequence, cap: int) -> int:
    """Number of basis triples of total weight <= cap, all degrees."""
    mins = [f.min_weight() for f in factors]
    acc: Dict[int, int] = {0: 1}
    for i, f in enumerate(factors):
        rest = sum(mins) - mins[i]
        counts = f.weight_counts(cap - rest)
        nxt: Dict[int, int] = {}
        for w1, n1 in acc.items():
            for w2, n2 in counts.items():
                nxt[w1 + w2] = nxt.get(w1 + w2, 0) + n1 * n2
        acc = nxt
    return sum(n for w, n in acc.items() if w <= cap)


def tensor_basis(factors: Sequence, cap: int, degrees: Window) -> Dict[int, List[Tuple]]:
    """Basis triples grouped by degree, restricted to the degree range."""
    lo, hi = degrees
    mins = [f.min_weight() for f in factors]
    grouped = []
    for i, f in enumerate(factors):
        rest = sum(mins) - mins[i]
        by_w: Dict[int, List[Tuple]] = {}
        for lab in f.labels_by_weight(cap - rest):
            by_w.setdefault(f.weight(lab), []).append((lab, f.degree(lab)))
        grouped.append(sorted(by_w.items()))
    basis: Dict[int, List[Tuple]] = {}
    g1, g2, g3 = grouped
    for w1, labs1 in g1:
        for w2, labs2 in g2:
            if w1 + w2 + mins[2] > cap:
                continue
            for w3, labs3 in g3:
                if w1 + w2 + w3 > cap:
                    continue
                for a, da in labs1:
                    for b, db in labs2:
                        for c, dc in labs3:
                            n = da + db + dc
                            if lo <= n <= hi:
                                basis.setdefault(n, []).append((a, b, c))
    return basis


def sandwich_comodule(X: DGComodule, P, Y: DGComodule, tau: TwistingCochain, cap: int,
                      degrees: Window, name: str = "") -> ChainComplex:
    """X (x)^tau P (x)^tau Y, truncated at total weight cap."""
    K = tau.source.domain

    def d(lab) -> Lin:
        x, p, y = lab
        dx, dp = X.degree(x), P.degree(p)
        out: Lin = {}
        for x2, v in X.d(x).items():
            lin_add(out, v, {(x2, p, y): K.one})
        ex = sign(K, dx)
        for p2, v in P.d(p).items():
            lin_add(out, ex * v, {(x, p2, y): K.one})
        exp = sign(K, dx + dp)
        for y2, v in Y.d(y).items():
            lin_add(out, exp * v, {(x, p, y2): K.one})
        for (x0, c), v in X.right_coaction(x).items():
            s = sign(K, X.degree(x0)) * v
            for a, u in tau(c).items():
                for p2, w in P.left_act(a, p).items():
                    lin_add(out, s * u * w, {(x0, p2, y): K.one})
        for (c, y0), v in Y.left_coaction(y).items():
            s = -exp * v
            for a, u in tau(c).items():
                for p2, w in P.right_act(p, a).items():
                    lin_add(out, s * u * w, {(x, p2, y0): K.one})
        return out

    factors = (X, P, Y)
    basis = tensor_basis(factors, cap, degrees)
    logger.debug("comodule sandwich %s: cap=%d dims=%s", name, cap, {n: len(b) for n, b in basis.items()})
    return ChainComplex.from_operator(basis, d, K, complete=tensor_completeness(factors, cap), name=name)


def sandwich_module(P, E: DGComodule, Q, tau: TwistingCochain, cap: int, degrees: Window,
                    name: str = "") -> ChainComplex:
    """P (x)^tau E (x)^tau Q, truncated at total weight cap."""
    K = tau.source.domain

    def d(lab) -> Lin:
        p, e, q = lab
        dp, de = P.degree(p), E.degree(e)
        out: Lin = {}
        for p2, v in P.d(p).items():
            lin_add(out, v, {(p2, e, q): K.one})
        ep = sign(K, dp)
        for e2, v in E.d(e).items():
            lin_add(out, ep * v, {(p, e2, q): K.one})
        epe = sign(K, dp + de)
        for q2, v in Q.d(q).items():
            lin_add(out, epe * v, {(p, e, q2): K.one})
        for (c, e0), v in E.left_coaction(e).items():
            s = -ep * v
            for a, u in tau(c).items():
                for p2, w in P.right_act(p, a).items():
                    lin_add(out, s * u * w, {(p2, e0, q): K.one})
        for (e0, c), v in E.right_coaction(e).items():
            s = sign(K, dp + E.degree(e0)) * v
            for a, u in tau(c).items():
                for q2, w in Q.left_act(a, q).items():
                    lin_add(out, s * u * w, {(p, e0, q2): K.one})
        return out

    factors = (P, E, Q)
    basis = tensor_basis(factors, cap, degrees)
    logger.debug("module sandwich %s: cap=%d dims=%s", name, cap, {n: len(b) for n, b in basis.items()})
    return ChainComplex.from_operator(basis, d, K, complete=tensor_completeness(factors, cap), name=name)


def _extended(window: Window) -> Window:
    return window[0] - 1, window[1] + 1


def _square_zero(C: ChainComplex) -> ChainComplex:
    C.check_square_zero()
    return C


def twisted_tensor(side: str, X: DGComodule, tau: TwistingCochain, M, cap: int, window: Window,
                   name: str = "") -> ChainComplex:
    """
    One-sided twisted tensor product.

    side="left":  X (x)^tau M for a right comodule X and a left module M
    side="right": M (x)^tau X for a right module M and a left comodule X

    The complex carries degrees window-1 .. window+1 so that homology in
    the window is computable.

    Raises:
        MaurerCartanViolated: when tau fails the MC equation up to weight cap
        DifferentialNotSquareZero: when the twisted differential does not square to zero
    """
    if side not in ("left", "right"):
        raise GradingMismatch("side must be 'left' or 'right'", {"side": side})
    tau.require_mc(cap)
    k_comod = DGComodule.trivial(tau.source)
    if side == "left":
        if not X.is_right:
            raise GradingMismatch("left twisted tensor needs a right comodule", {"comodule": X.name})
        return _square_zero(sandwich_comodule(X, M, k_comod, tau, cap, _extended(window),
                                              name=name or f"{X.name}(x){M.name}"))
    if not X.is_left:
        raise GradingMismatch("right twisted tensor needs a left comodule", {"comodule": X.name})
    return _square_zero(sandwich_comodule(k_comod, M, X, tau, cap, _extended(window),
                                          name=name or f"{M.name}(x){X.name}"))


def twisted_tensor_two_sided(E: DGComodule, tau: TwistingCochain, cap: int, window: Window,
                             name: str = "") -> ChainComplex:
    """A (x)^tau E (x)^tau A for a bicomodule E, with A the target algebra of tau."""
    tau.require_mc(cap)
    A = RegularModule(tau.target)
    return _square_zero(sandwich_module(A, E, A, tau, cap, _extended(window), name=name or f"A(x){E.name}(x)A"))


def twisted_hom(M: DGComodule, N: DGComodule, tau: TwistingCochain, cap: int, window: Window,
                name: str = "") -> ChainComplex:
    """
    Hom^tau(M, A (x) N) for a finite left comodule M, realized as
    M* (x)^tau A (x)^tau N. The four summands of the differential are the
    internal differentials of M and A (x) N and the twists by the
    coactions of M and N.

    Raises:
        InfiniteRankSource: when M is not of finite rank
        MaurerCartanViolated: when tau fails the MC equation up to weight cap
    """
    if not isinstance(M, DGComodule) or not M.finite_rank:
        raise InfiniteRankSource("twisted_hom needs a finite-rank source comodule",
                                 {"source": getattr(M, "name", type(M).__name__)})
    if not M.is_left or not N.is_left:
        raise GradingMismatch("twisted_hom needs left comodules", {"source": M.name, "target": N.name})
    tau.require_mc(cap)
    dual = M.dual()
    A = RegularModule(tau.target)
    return _square_zero(sandwich_comodule(dual, A, N, tau, cap, _extended(window),
                                          name=name or f"Hom({M.name},{N.name})"))


__all__ = [
    "sandwich_comodule",
    "sandwich_module",
    "tensor_basis",
    "tensor_basis_count",
    "tensor_completeness",
    "twisted_hom",
    "twisted_tensor",
    "twisted_tensor_two_sided",
]
