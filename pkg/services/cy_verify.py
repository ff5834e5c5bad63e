"""
Calabi-Yau verifiers.

Proper CY on a finite-rank coalgebra C (equivalently smooth CY on its
cobar), and proper CY on a finite-dimensional algebra A (equivalently
smooth CY on its bar). Every verdict comes with the matrix identities it
relied on; a VERIFIED report is replayed before it is returned.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from config.settings import settings
from exceptions import (
    DegenerateTrace,
    DomainMismatch,
    GradingMismatch,
    InfiniteRank,
    NotACycle,
)
from homology.complexes import ChainComplex, ChainMap, Window, cone, homology
from koszul.barcobar import CobarAlgebra, bar, bar_tau, module_complex, universal_tau
from koszul.cyclic import MixedComplex, NegativeCyclicLift, cohochschild_complex, lift_to_negative_cyclic
from koszul.dgstruct import (
    DGAlgebra,
    DGCoalgebra,
    DGComodule,
    DualModule,
    Label,
    Lin,
    RegularModule,
    comodule_map_failures,
    lin_add,
    require_mc,
)
from koszul.twisted import sandwich_comodule, tensor_basis_count, twisted_tensor_two_sided
from linalg.domains import domain_name, is_field, sign, to_pair
from linalg.elimination import rank
from linalg.sparse import SparseMatrix
from models.report import (
    CYReport,
    Identity,
    Obstruction,
    Verdict,
    chain_map_identities,
    invertible_identity,
    is_invertible,
    lift_identities,
    lin_witness,
    replay,
)

logger = logging.getLogger(__name__)


def _require_field(K, what: str):
    if not is_field(K):
        raise DomainMismatch(f"{what} needs a field of scalars", {"scalar": domain_name(K)})


class _Stopwatch:
    def __init__(self):
        self.enabled = settings.reports.INCLUDE_TIMINGS
        self.marks: Dict[str, float] = {}
        self._t0 = time.perf_counter()

    def mark(self, name: str):
        now = time.perf_counter()
        self.marks[name] = round(now - self._t0, 4)
        self._t0 = now

    def result(self) -> Optional[Dict[str, float]]:
        return self.marks if self.enabled else None


# ── Dual bicomodule ─────────────────────────────────────────────


@dataclass
class DualBicomodule:
    """E* with coactions transported from E, plus the finite-rank record."""
    base: DGComodule
    dual: DGComodule
    rank: int
    finite_rank: bool = True


def dual_comodule(E) -> DualBicomodule:
    """
    Raises:
        InfiniteRank: when E is not a finite-rank comodule
        NotCoassociative: when the transported coactions fail the axioms
    """
    if not isinstance(E, DGComodule) or not E.finite_rank:
        raise InfiniteRank("Only finite-rank comodules have a dual comodule",
                           {"object": getattr(E, "name", type(E).__name__)})
    D = E.dual()
    D.verify()
    return DualBicomodule(base=E, dual=D, rank=len(D.labels))


# ── phi(beta) ───────────────────────────────────────────────────


def beta_degree_and_weight(C: DGCoalgebra, beta: Lin) -> Tuple[Optional[int], int]:
    Om = CobarAlgebra(C, None)
    degrees = {C.degree(c) + Om.degree(w) for (c, w), v in beta.items() if v}
    if len(degrees) > 1:
        raise GradingMismatch("coHochschild class is not homogeneous", {"degrees": sorted(degrees)})
    weight = max((C.weight(c) + Om.weight(w) for (c, w), v in beta.items() if v), default=0)
    return (degrees.pop() if degrees else None), weight


def cycle_complex(C: DGCoalgebra, beta: Lin, n: int, cap: int, N: int = 0) -> MixedComplex:
    """
    coCH(C) around degree n at a weight cap holding beta.

    Raises:
        NotACycle: when b(beta) != 0
    """
    deg, wb = beta_degree_and_weight(C, beta)
    if deg is not None and deg != n:
        raise GradingMismatch("coHochschild class has the wrong degree", {"degree": deg, "n": n})
    mixed = cohochschild_complex(C, max(cap, wb), (n, n), N=N)
    M = mixed.complex
    if not M.is_cycle(n, M.module.vector(n, beta)):
        raise NotACycle("beta is not a b-cycle", {"degree": n, "coalgebra": C.name})
    return mixed


def cycle_map(C: DGCoalgebra, beta: Lin, n: int) -> Dict[Label, Lin]:
    """g(c*) = sum_w (-1)^{n|c|} beta_{c,w} w: the element of Hom(C*, Omega) matching beta."""
    K = C.domain
    g: Dict[Label, Lin] = {}
    for (c, w), v in beta.items():
        if v:
            lin_add(g.setdefault(c, {}), sign(K, n * C.degree(c)) * v, {w: K.one})
    return g


def phi_of_cycle(beta: Lin, C: DGCoalgebra, n: int, level: int, window: Window) -> ChainMap:
    """
    The degree-n chain map Omega (x) C* (x) Omega -> Omega induced by beta,

        x (x) xi (x) y  ->  (-1)^{n|x|} x g(xi) y,

    with the source truncated at weight `level` and the target at
    level + wt(beta). Composed with the counit resolution of Omega this is
    phi(beta): C* -> C[n] on two-sided twisted complexes.

    Raises:
        NotACycle, InfiniteRank, NotAChainMap
    """
    _require_field(C.domain, "phi_of_cycle")
    cycle_complex(C, beta, n, level)
    K = C.domain
    lo, hi = window
    tau = universal_tau(C)
    Om = tau.target
    dual = dual_comodule(DGComodule.regular(C)).dual
    source = twisted_tensor_two_sided(dual, tau, level, (lo - 1, hi + 1), name=f"Omega(x){C.name}*(x)Omega")
    _, wb = beta_degree_and_weight(C, beta)
    target = CobarAlgebra(C, level + wb).as_complex((lo - 2 + n, hi + 2 + n))
    g = cycle_map(C, beta, n)

    def psi(lab) -> Lin:
        x, xi, y = lab
        image = g.get(xi[1])
        if not image:
            return {}
        eps = sign(K, n * Om.degree(x))
        return {x + w + y: eps * v for w, v in image.items()}

    f = ChainMap.from_operator(source, target, n, psi, name=f"phi({C.name})")
    f.check()
    logger.debug("phi(beta) on %s at level %d: source dims %s", C.name, level,
                 {m: source.dim(m) for m in source.degrees()})
    return f


def two_sided_level(C: DGCoalgebra, L: int, limit: int) -> Optional[int]:
    """Largest filtration level <= L whose two-sided complex has at most `limit` basis elements."""
    tau = universal_tau(C)
    P = RegularModule(tau.target)
    dual = DGComodule.regular(C).dual()
    for level in range(L, -1, -1):
        if tensor_basis_count((P, dual, P), level) <= limit:
            return level
    return None


@dataclass
class ConeCheck:
    window: Window
    trusted: List[int] = field(default_factory=list)
    trusted_failures: List[int] = field(default_factory=list)
    untrusted_nonzero: List[int] = field(default_factory=list)

    @property
    def fully_trusted(self) -> bool:
        lo, hi = self.window
        return len(self.trusted) == hi - lo + 1

    @property
    def acyclic(self) -> bool:
        return not self.trusted_failures and not self.untrusted_nonzero

    def as_dict(self) -> Dict[str, Any]:
        return {
            "window": list(self.window),
            "trusted": self.trusted,
            "trusted_failures": self.trusted_failures,
            "untrusted_nonzero": self.untrusted_nonzero,
        }


def cone_check(f: ChainMap, window: Window) -> ConeCheck:
    """Cone homology of f over the cone degrees matching source degrees window."""
    lo, hi = window
    cwin = (lo + f.degree, hi + f.degree + 1)
    table = homology(cone(f), cwin)
    out = ConeCheck(window=cwin)
    for t, grp in sorted(table.groups.items()):
        nonzero = bool(grp.rank or grp.torsion)
        if grp.trusted:
            out.trusted.append(t)
            if nonzero:
                out.trusted_failures.append(t)
        elif nonzero:
            out.untrusted_nonzero.append(t)
    return out


def _untrusted_degrees(chk: Optional[ConeCheck], window: Window) -> List[int]:
    """Source degrees of the window whose cone degree is not trusted."""
    lo, hi = window
    if chk is None:
        return list(range(lo, hi + 1))
    shift = chk.window[0] - lo
    return [m for m in range(lo, hi + 1) if m + shift not in chk.trusted]


# ── Certificates ────────────────────────────────────────────────


@dataclass
class StrictCertificate:
    """A candidate map C* -> C of degree n given on dual labels ("*", c)."""
    operator: Callable[[Label], Lin]
    name: str = "certificate"


def _bijective(f: ChainMap) -> bool:
    degrees = set(f.source.degrees()) | {k - f.degree for k in f.target.degrees()}
    for m in degrees:
        if f.source.dim(m) != f.target.dim(m + f.degree):
            return False
        if f.source.dim(m) and not is_invertible(f.component(m)):
            return False
    return True


def certificate_checks(C: DGCoalgebra, cert: StrictCertificate, n: int) -> Tuple[Dict[str, Any], ChainMap]:
    reg = DGComodule.regular(C)
    dual = reg.dual()
    f = ChainMap.from_operator(dual.as_complex(), reg.as_complex(), n, cert.operator, name=cert.name)
    left = comodule_map_failures(dual, reg, cert.operator, n, side="left")
    right = comodule_map_failures(dual, reg, cert.operator, n, side="right")
    checks = {
        "chain_map": not f.failures(),
        "bijective": _bijective(f),
        "left_comodule": not left,
        "right_comodule": not right,
        "cocommutative": C.cocommutative,
    }
    checks["passed"] = (checks["chain_map"] and checks["bijective"] and checks["left_comodule"]
                        and (checks["right_comodule"] or C.cocommutative))
    return checks, f


def _bijection_identities(f: ChainMap, label: str) -> List[Identity]:
    return [invertible_identity(f.component(m), f"{label}@{m}", m)
            for m in f.source.degrees() if f.source.dim(m)]


# ── Proper CY on a coalgebra ────────────────────────────────────


def rank_obstruction(C: DGCoalgebra, n: int) -> Optional[Obstruction]:
    """First degree (from the top) where rank H_m(C*) != rank H_{m+n}(C)."""
    reg = DGComodule.regular(C)
    Cd, Cc = reg.dual().as_complex(), reg.as_complex()
    ms = set(Cd.degrees()) | {k - n for k in Cc.degrees()}
    lo, hi = min(ms), max(ms)
    Hd = homology(Cd, (lo, hi))
    Hc = homology(Cc, (lo + n, hi + n))
    for m in range(hi, lo - 1, -1):
        if Hd.rank(m) != Hc.rank(m + n):
            return Obstruction(degree=m + n, ranks=(Hd.rank(m), Hc.rank(m + n)),
                               reason=f"rank H_{m}(C*) != rank H_{m + n}(C)")
    return None


def check_proper_cy(C: DGCoalgebra, beta: Lin, n: int, L: int, window: Window, N: int,
                    certificate: Optional[StrictCertificate] = None, pd_definitive: bool = False,
                    subject: str = "") -> CYReport:
    """
    Decide whether beta in coHH_n(C) is a proper n-CY class.

    Steps: rank comparison H(C*) vs H(C[n]); cycle check and negative
    cyclic lift; phi(beta) on the two-sided twisted complexes at the
    largest affordable filtration level; optional strict certificate.
    """
    K = C.domain
    _require_field(K, "check_proper_cy")
    watch = _Stopwatch()
    report = CYReport(subject=subject or C.name, verdict=Verdict.FAILED, n=n, scalar=domain_name(K),
                      truncation={"L": L, "D": list(window), "N": N})

    obstruction = rank_obstruction(C, n)
    watch.mark("ranks")
    report.checks["rank_comparison"] = obstruction is None
    if obstruction is not None:
        report.obstruction = obstruction
        report.timings = watch.result()
        logger.info("check_proper_cy %s: FAILED at degree %d", report.subject, obstruction.degree)
        return report

    tau = universal_tau(C)
    require_mc(tau)
    mixed = cycle_complex(C, beta, n, L, N=N)
    lift: NegativeCyclicLift = lift_to_negative_cyclic(mixed, beta, n, N)
    watch.mark("lift")
    report.lift = [lin_witness(K, stage) for stage in lift.stages]
    report.checks["lift_complete"] = lift.complete
    report.witness.extend(lift_identities(mixed, lift, "lift"))
    if not lift.complete:
        obs = lift.obstruction
        report.lift_obstruction = Obstruction(
            degree=obs.degree, ranks=(len(obs.classes), 0),
            reason=f"-B x_{obs.stage - 1} is not a b-boundary",
            representative=lin_witness(K, obs.cycle),
            coordinates=[to_pair(K, c) for c in obs.coordinates])
        report.notes.append(f"negative cyclic lift obstructed at stage {obs.stage}")

    cone_ok: Optional[ConeCheck] = None
    level = two_sided_level(C, L, settings.truncation.TWO_SIDED_BASIS_LIMIT)
    if level is None:
        report.notes.append("two-sided complexes exceed the basis limit at every level")
    else:
        if level < L:
            report.notes.append(f"two-sided check run at filtration level {level}")
        levels = {}
        for lv in range(0, level + 1):
            f = phi_of_cycle(beta, C, n, lv, window)
            chk = cone_check(f, window)
            levels[str(lv)] = chk.as_dict()
            if lv == level:
                report.witness.extend(chain_map_identities(f, f"phi@{lv}"))
                cone_ok = chk
            if chk.trusted_failures:
                report.obstruction = Obstruction(degree=chk.trusted_failures[0], ranks=(1, 0),
                                                 reason=f"cone of phi(beta) has homology at level {lv}")
                report.checks["two_sided"] = levels
                report.timings = watch.result()
                logger.info("check_proper_cy %s: FAILED on the two-sided check", report.subject)
                return report
        report.checks["two_sided"] = levels
        report.checks["two_sided_level"] = level
    watch.mark("two_sided")

    grounds: List[str] = []
    if certificate is not None:
        checks, fc = certificate_checks(C, certificate, n)
        report.checks["strict_certificate"] = checks
        if checks["passed"]:
            grounds.append("strict_certificate")
            report.witness.extend(chain_map_identities(fc, certificate.name))
            report.witness.extend(_bijection_identities(fc, certificate.name))
    if pd_definitive:
        report.checks["poincare_duality"] = True
        grounds.append("poincare_duality")
    if cone_ok is not None and cone_ok.fully_trusted and cone_ok.acyclic:
        grounds.append("two_sided")
    report.provenance = {
        "verified_by": grounds,
        "two_sided_level": level,
        "trusted_degrees": list(cone_ok.trusted) if cone_ok is not None else [],
    }

    report.verdict = Verdict.VERIFIED if grounds and lift.complete else Verdict.VERIFIED_FILTERED
    if report.verdict == Verdict.VERIFIED_FILTERED:
        report.untrusted = _untrusted_degrees(cone_ok, window)
    if report.verdict == Verdict.VERIFIED:
        replay(report)
    watch.mark("certify")
    report.timings = watch.result()
    logger.info("check_proper_cy %s: %s", report.subject, report.verdict.value)
    return report


# ── Proper CY on a finite algebra ───────────────────────────────


@dataclass
class FrobeniusDatum:
    """A finite-rank dg algebra with a trace functional of degree -n."""
    algebra: DGAlgebra
    trace: Dict[Label, Any]
    name: str = ""

    def __post_init__(self):
        self.name = self.name or self.algebra.name

    def tr(self, combo: Lin):
        K = self.algebra.domain
        return sum((v * self.trace.get(a, K.zero) for a, v in combo.items()), K.zero)

    def pairing_matrix(self) -> SparseMatrix:
        A = self.algebra
        basis = A.basis()
        entries = {}
        for i, a in enumerate(basis):
            for j, b in enumerate(basis):
                v = self.tr(A.mul(a, b))
                if v:
                    entries[(i, j)] = v
        return SparseMatrix.from_entries(entries, (len(basis), len(basis)), A.domain)

    def phi(self, a: Label) -> Lin:
        """Phi(a)(x) = tr(a x), as a combination of dual labels."""
        A = self.algebra
        out: Lin = {}
        for x in A.basis():
            v = self.tr(A.mul(a, x))
            if v:
                out[("*", x)] = v
        return out

    def symmetry_failures(self) -> List[Tuple[Label, Label]]:
        A = self.algebra
        K = A.domain
        bad = []
        for a in A.basis():
            for b in A.basis():
                eps = sign(K, A.degree(a) * A.degree(b))
                if self.tr(A.mul(a, b)) != eps * self.tr(A.mul(b, a)):
                    bad.append((a, b))
        return bad

    def check_degree(self, n: int):
        for a, v in self.trace.items():
            if v and self.algebra.degree(a) != n:
                raise GradingMismatch("trace must be supported in degree n", {"label": repr(a), "n": n})


def _bimodule_failures(F: FrobeniusDatum, n: int) -> List[str]:
    A = F.algebra
    K = A.domain
    D = DualModule(A)
    bad = []
    for a in A.basis():
        for b in A.basis():
            lhs: Lin = {}
            for e, v in A.mul(a, b).items():
                lin_add(lhs, v, F.phi(e))
            right: Lin = {}
            for xi, v in F.phi(a).items():
                lin_add(right, v, D.right_act(xi, b))
            if lhs != right:
                bad.append(f"right {a!r},{b!r}")
            left: Lin = {}
            for xi, v in F.phi(b).items():
                lin_add(left, sign(K, n * A.degree(a)) * v, D.left_act(a, xi))
            if lhs != left:
                bad.append(f"left {a!r},{b!r}")
    return bad


def _dual_complex(A: DGAlgebra) -> ChainComplex:
    D = DualModule(A)
    degrees = [-A.degree(a) for a in A.basis()]
    return module_complex(D, 0, (min(degrees), max(degrees)), name=D.name)


def proper_cy_algebra(F: FrobeniusDatum, n: int) -> CYReport:
    """Nondegenerate pairing, bimodule map A -> A*[n] and chain map; symmetry recorded."""
    A = F.algebra
    K = A.domain
    _require_field(K, "proper_cy_algebra")
    F.check_degree(n)
    A.verify()
    report = CYReport(subject=F.name, verdict=Verdict.FAILED, n=n, scalar=domain_name(K))
    P = F.pairing_matrix()
    r = rank(P)
    nondegenerate = r == P.n_rows
    symmetric = not F.symmetry_failures()
    report.checks.update({"pairing_rank": r, "dimension": P.n_rows, "nondegenerate": nondegenerate,
                          "symmetric": symmetric})
    if not nondegenerate:
        report.obstruction = Obstruction(degree=n, ranks=(r, P.n_rows), reason="degenerate pairing")
        logger.info("proper_cy_algebra %s: degenerate pairing (rank %d of %d)", F.name, r, P.n_rows)
        return report
    report.witness.append(invertible_identity(P, "pairing"))

    f = ChainMap.from_operator(A.as_complex(), _dual_complex(A), -n, F.phi, name="Phi")
    chain_ok = not f.failures()
    bimodule = _bimodule_failures(F, n)
    report.checks.update({"chain_map": chain_ok, "bimodule_map": not bimodule})
    if not chain_ok or bimodule:
        reason = "trace map is not a chain map" if not chain_ok else "trace map is not a bimodule map"
        report.obstruction = Obstruction(degree=n, ranks=(r, P.n_rows), reason=reason)
        return report
    report.witness.extend(chain_map_identities(f, "Phi"))
    report.checks["cyclic_factorization"] = symmetric
    report.verdict = Verdict.VERIFIED
    replay(report)
    logger.info("proper_cy_algebra %s: VERIFIED (symmetric=%s)", F.name, symmetric)
    return report


def smooth_cy_on_bar(F: FrobeniusDatum, n: int, L: int, window: Window) -> CYReport:
    """
    Compare G(A) = B (x) A (x) B with C^! = G(A*) = B (x) A* (x) B through the
    trace map, B = bar(A) truncated at word length L.

    Raises:
        DegenerateTrace: when the trace pairing is degenerate
    """
    A = F.algebra
    K = A.domain
    pre = proper_cy_algebra(F, n)
    if not pre.checks.get("nondegenerate"):
        raise DegenerateTrace("Trace pairing is degenerate", {"rank": pre.checks.get("pairing_rank"),
                                                              "dimension": pre.checks.get("dimension")})
    report = CYReport(subject=f"B({F.name})", verdict=Verdict.FAILED, n=n, scalar=domain_name(K),
                      truncation={"L": L, "D": list(window)})
    report.checks["proper"] = pre.verdict.value
    if pre.verdict == Verdict.FAILED:
        report.obstruction = pre.obstruction
        return report
    lo, hi = window
    B = bar(A, L)
    tau = bar_tau(B, A)
    require_mc(tau)
    Breg = DGComodule.regular(B)
    GA = sandwich_comodule(Breg, RegularModule(A, weighted=False), Breg, tau, L, (lo - 2, hi + 2),
                           name=f"G({A.name})")
    GAd = sandwich_comodule(Breg, DualModule(A, weighted=False), Breg, tau, L, (lo - 2 - n, hi + 2 - n),
                            name=f"G({A.name}*)")

    def g_phi(lab) -> Lin:
        x, a, y = lab
        eps = sign(K, n * B.degree(x))
        return {(x, xi, y): eps * v for xi, v in F.phi(a).items()}

    f = ChainMap.from_operator(GA, GAd, -n, g_phi, name="G(Phi)")
    f.check()
    chk = cone_check(f, window)
    report.checks["cone"] = chk.as_dict()
    report.witness.extend(chain_map_identities(f, "G(Phi)"))
    if chk.trusted_failures:
        report.obstruction = Obstruction(degree=chk.trusted_failures[0], ranks=(1, 0),
                                         reason="cone of G(Phi) has homology")
        return report
    iso = _bijective(f)
    report.checks["iso"] = iso
    if iso:
        report.witness.extend(_bijection_identities(f, "G(Phi)"))
    symmetric = bool(pre.checks.get("symmetric"))
    if iso and symmetric and chk.fully_trusted:
        report.verdict = Verdict.VERIFIED
        replay(report)
    else:
        report.verdict = Verdict.VERIFIED_FILTERED
    logger.info("smooth_cy_on_bar %s: %s", F.name, report.verdict.value)
    return report


__all__ = [
    "ConeCheck",
    "DualBicomodule",
    "FrobeniusDatum",
    "StrictCertificate",
    "certificate_checks",
    "check_proper_cy",
    "cone_check",
    "cycle_complex",
    "cycle_map",
    "dual_comodule",
    "phi_of_cycle",
    "proper_cy_algebra",
    "rank_obstruction",
    "smooth_cy_on_bar",
    "two_sided_level",
]
