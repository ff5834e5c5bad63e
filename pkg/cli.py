#!/usr/bin/env python3
"""
koszul-cy: command-line front end

Decides Calabi-Yau properties of Lie algebras, triangulated spaces, dg
coalgebras and Frobenius algebras with exact arithmetic.

Usage:
    koszul-cy lie unimodular --builtin heisenberg
    koszul-cy lie check-cy --builtin aff1 -L 3
    koszul-cy space check-cy --builtin sphere2 -L 4 --window 0:3
    koszul-cy coalg cohh --builtin ce_heisenberg
    koszul-cy alg smooth-cy-on-bar --builtin dual_numbers -L 5
    koszul-cy selftest
    koszul-cy replay report.json

Exit codes: 0 VERIFIED/true, 10 FAILED/false, 20 VERIFIED_FILTERED,
2 input error, 1 internal error.
"""

import argparse
import json
import logging
import os
import sys

# Ensure the project root is in the path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from pydantic import ValidationError  # noqa: E402

from config.settings import settings  # noqa: E402
from exceptions import ComputationError, InputError, KoszulError, ReplayFailed, SchemaError, StructureError  # noqa: E402
from models.report import CYReport, Verdict, replay  # noqa: E402

logger = logging.getLogger("koszul_cy")

VERSION = "0.1.0"

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_FAILED = 10
EXIT_FILTERED = 20

VERDICT_EXIT = {
    Verdict.VERIFIED: EXIT_OK,
    Verdict.FAILED: EXIT_FAILED,
    Verdict.VERIFIED_FILTERED: EXIT_FILTERED,
}


# ── Shared plumbing ─────────────────────────────────────────────


def run_config(args):
    """RunConfig from CLI flags over settings."""
    from models.schemas import RunConfig

    trunc = settings.truncation
    try:
        return RunConfig(
            scalar=args.scalar or settings.scalars.DEFAULT_SCALAR,
            L=args.L if args.L is not None else trunc.LENGTH_CAP,
            window=args.window or f"{trunc.WINDOW_LO}:{trunc.WINDOW_HI}",
            N=args.N if args.N is not None else trunc.U_TRUNCATION,
            report=args.report,
        )
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(x) for x in first.get("loc", ())) or "options"
        raise SchemaError(f"Invalid option: {first.get('msg')}", {"field": field}) from exc


def emit(payload, cfg) -> None:
    """Print a report or a plain payload and save it when --report is set."""
    indent = settings.reports.INDENT
    if isinstance(payload, CYReport):
        text = payload.to_json(indent=indent)
    else:
        text = json.dumps(payload, sort_keys=True, indent=indent)
    print(text)
    if cfg is not None and cfg.report:
        with open(cfg.report, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        logger.info("report written to %s", cfg.report)


def report_exit(report: CYReport) -> int:
    return VERDICT_EXIT[report.verdict]


def flag_exit(ok: bool) -> int:
    return EXIT_OK if ok else EXIT_FAILED


def load_input(args, *kinds):
    """The --input document, checked to be one of `kinds`; None without --input."""
    from models.schemas import load_document

    if not args.input:
        return None
    doc = load_document(args.input)
    if doc.kind not in kinds:
        raise SchemaError(f"Expected a {' or '.join(kinds)} document, got '{doc.kind}'",
                          {"field": "kind", "path": args.input})
    return doc


def require_source(args):
    if not args.input and not args.builtin:
        raise SchemaError("Give --builtin <name> or --input <file>", {"field": "builtin"})


# ── lie ──


def lie_input(args, cfg):
    from services import catalog

    require_source(args)
    doc = load_input(args, "lie_algebra")
    g = doc.build(cfg.domain) if doc else catalog.lie(args.builtin, cfg.domain)
    g.check_jacobi()
    return g


def cmd_lie_unimodular(args, cfg):
    """tr(ad x) = 0 for all x."""
    from linalg.domains import to_text

    g = lie_input(args, cfg)
    ok = g.is_unimodular()
    emit({"algebra": g.name, "dimension": g.dim, "unimodular": ok,
          "modular_character": [to_text(g.domain, v) for v in g.modular_character()]}, cfg)
    return flag_exit(ok)


def cmd_lie_check_cy(args, cfg):
    """Unimodularity cross-checked against the proper CY check of C_*(g)."""
    from services.lie_service import check_lie_cy

    g = lie_input(args, cfg)
    report = check_lie_cy(g, cfg.L, cfg.window, cfg.N)
    emit(report, cfg)
    return report_exit(report)


def cmd_lie_betti(args, cfg):
    """Chevalley-Eilenberg homology ranks."""
    from services.lie_service import ce_betti

    g = lie_input(args, cfg)
    table = ce_betti(g, (0, g.dim))
    emit({"algebra": g.name, "betti": table.betti(), "groups": table.as_dict()}, cfg)
    return EXIT_OK


# ── space ──


def space_input(args, cfg):
    """(complex, CY dimension, base vertex) from --builtin or a simplicial_complex document."""
    from services import catalog

    require_source(args)
    doc = load_input(args, "simplicial_complex")
    if doc:
        K = doc.build()
        return K, doc.cy_dimension(), doc.base_vertex
    K = catalog.space(args.builtin)
    return K, catalog.dimension_of(args.builtin, K), args.base_vertex


def local_systems(args, cfg, K, base_vertex):
    """Systems from --system files, else the space's defaults (None lets check_pd choose)."""
    from models.schemas import load_document
    from services import catalog
    from topology.reduction import reduce_by_tree

    M = reduce_by_tree(K, base_vertex, cfg.domain)
    if args.system:
        systems = []
        for path in args.system:
            doc = load_document(path)
            if doc.kind != "local_system":
                raise SchemaError("Expected a local_system document", {"field": "kind", "path": path})
            systems.append(doc.build(M, cfg.domain))
        return M, systems
    return M, catalog.default_systems(args.builtin or "", M, cfg.domain)


def cmd_space_check_pd(args, cfg):
    """Cap with the fundamental class against twisted cochains, per local system."""
    from topology.duality import check_pd
    from topology.simplicial import fundamental_cycle

    K, n, base = space_input(args, cfg)
    M, systems = local_systems(args, cfg, K, base)
    alpha = fundamental_cycle(K, n, cfg.domain)
    result = check_pd(K, alpha, systems, M=M)
    payload = result.as_dict()
    payload["space"] = K.name
    emit(payload, cfg)
    return flag_exit(result.passed)


def cmd_space_check_cy(args, cfg):
    """Poincare duality bridged to the proper CY check of the chain coalgebra."""
    from services.space_service import check_space_cy
    from topology.simplicial import fundamental_cycle

    K, n, base = space_input(args, cfg)
    _, systems = local_systems(args, cfg, K, base)
    alpha = fundamental_cycle(K, n, cfg.domain)
    report = check_space_cy(K, base, alpha, cfg.L, cfg.window, cfg.N, systems)
    emit(report, cfg)
    return report_exit(report)


def cmd_space_pi1(args, cfg):
    """Edge-path presentation and order of pi1."""
    from services.space_service import space_pi1

    K, _, base = space_input(args, cfg)
    summary = space_pi1(K, base, cfg.domain)
    payload = summary.as_dict()
    payload["space"] = K.name
    emit(payload, cfg)
    return EXIT_OK


def cmd_space_betti(args, cfg):
    """Simplicial homology, with torsion over z."""
    from services.space_service import space_betti

    K, _, _ = space_input(args, cfg)
    table = space_betti(K, cfg.domain)
    emit({"space": K.name, "betti": table.betti(), "groups": table.as_dict(),
          "euler_characteristic": K.euler_characteristic()}, cfg)
    return EXIT_OK


# ── coalg ──


def coalgebra_input(args, cfg):
    from services import catalog

    require_source(args)
    doc = load_input(args, "dg_coalgebra")
    if doc:
        C = doc.build(cfg.domain)
        C.verify()
        return C, doc
    return catalog.coalgebra(args.builtin, cfg.domain), None


def cmd_coalg_cobar(args, cfg):
    """Homology of the cobar construction truncated at weight L."""
    from homology.complexes import homology
    from koszul.barcobar import CobarAlgebra

    C, _ = coalgebra_input(args, cfg)
    Om = CobarAlgebra(C, cfg.L)
    lo, hi = cfg.window
    table = homology(Om.as_complex((lo - 1, hi + 1)), cfg.window)
    emit({"coalgebra": C.name, "L": cfg.L, "betti": table.betti(), "groups": table.as_dict()}, cfg)
    return EXIT_OK


def cmd_coalg_betti_compare(args, cfg):
    """coHH(C) against HH(Omega C) on trusted degrees."""
    from koszul.cyclic import betti_compare

    C, _ = coalgebra_input(args, cfg)
    result = betti_compare(C, cfg.L, cfg.window)
    payload = result.as_dict()
    payload["coalgebra"] = C.name
    emit(payload, cfg)
    return VERDICT_EXIT[result.verdict]


def cmd_coalg_cohh(args, cfg):
    """Cohochschild, negative cocyclic and cocyclic homology ranks."""
    from homology.complexes import homology
    from koszul.cyclic import cohochschild_complex

    C, _ = coalgebra_input(args, cfg)
    mixed = cohochschild_complex(C, cfg.L, cfg.window, cfg.N)
    tables = {
        "cohochschild": homology(mixed.complex, cfg.window),
        "negative_cyclic": homology(mixed.negative_cyclic(cfg.N, cfg.window), cfg.window),
        "cyclic": homology(mixed.cyclic(cfg.N, cfg.window), cfg.window),
    }
    payload = {name: {"betti": t.betti(), "groups": t.as_dict()} for name, t in tables.items()}
    payload.update({"coalgebra": C.name, "L": cfg.L, "N": cfg.N, "mixed_failures": mixed.failures()})
    emit(payload, cfg)
    return EXIT_OK


def cmd_coalg_check_cy(args, cfg):
    """Proper CY check of a coalgebra document carrying beta and n."""
    from services.cy_verify import check_proper_cy

    if not args.input:
        raise SchemaError("coalg check-cy needs --input with beta and n", {"field": "input"})
    C, doc = coalgebra_input(args, cfg)
    if doc.n is None or not doc.beta:
        raise SchemaError("The coalgebra document needs n and beta", {"field": "beta"})
    report = check_proper_cy(C, doc.build_beta(cfg.domain), doc.n, cfg.L, cfg.window, cfg.N)
    emit(report, cfg)
    return report_exit(report)


# ── alg ──


def frobenius_input(args, cfg):
    from services import catalog

    require_source(args)
    doc = load_input(args, "frobenius")
    F = doc.build(cfg.domain) if doc else catalog.frobenius(args.builtin, cfg.domain)
    n = args.n if args.n is not None else (doc.n if doc else 0)
    return F, n


def cmd_alg_check_proper_cy(args, cfg):
    """Nondegenerate trace pairing and bimodule map A -> A*[n]."""
    from services.cy_verify import proper_cy_algebra

    F, n = frobenius_input(args, cfg)
    report = proper_cy_algebra(F, n)
    emit(report, cfg)
    return report_exit(report)


def cmd_alg_smooth_cy_on_bar(args, cfg):
    """The trace map transported to the bar side."""
    from services.cy_verify import smooth_cy_on_bar

    F, n = frobenius_input(args, cfg)
    report = smooth_cy_on_bar(F, n, cfg.L, cfg.window)
    emit(report, cfg)
    return report_exit(report)


# ── selftest / replay / version ──


def cmd_selftest(args, cfg):
    """Structural identities on built-ins and seeded random inputs."""
    from services.selftest import run_selftest

    result = run_selftest(cfg.domain, seed=args.seed, cases=args.cases)
    emit(result.as_dict(), cfg)
    return flag_exit(result.passed)


def cmd_replay(args, cfg):
    """Re-verify the witness identities of a saved report."""
    try:
        with open(args.path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"Cannot read report: {exc.strerror}", {"path": args.path}) from exc
    try:
        report = CYReport.from_json(text)
    except ValidationError as exc:
        raise SchemaError("Not a report file", {"path": args.path, "errors": exc.error_count()}) from exc
    try:
        count = replay(report)
    except ReplayFailed as exc:
        emit({"path": args.path, "replayed": False, "error": exc.message, "context": exc.context}, None)
        return EXIT_FAILED
    emit({"path": args.path, "replayed": True, "identities": count, "verdict": report.verdict.value}, None)
    return EXIT_OK


def cmd_version(args, cfg):
    """Show version information."""
    print(f"koszul-cy-toolkit v{VERSION}")
    return EXIT_OK


# ── Parser ──────────────────────────────────────────────────────


def add_run_options(p, source: bool = True):
    p.add_argument("--scalar", type=str, default=None, help="q, z or fp:<p> (default: q)")
    p.add_argument("-L", type=int, default=None, help="weight cap (default: 4)")
    p.add_argument("--window", type=str, default=None, help="degree window lo:hi (default: 0:3)")
    p.add_argument("-N", type=int, default=None, help="u-truncation depth (default: 3)")
    p.add_argument("--report", type=str, default=None, help="write the JSON output to this file")
    p.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS, help="debug logging")
    if source:
        p.add_argument("--builtin", type=str, default=None, help="name of a built-in input")
        p.add_argument("--input", type=str, default=None, help="JSON input document")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="koszul-cy",
        description="Calabi-Yau checks through Koszul duality, with exact arithmetic",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  koszul-cy lie unimodular --builtin heisenberg        exit 0
  koszul-cy lie check-cy --builtin aff1 -L 3           exit 10, obstruction in degree 2
  koszul-cy space check-cy --builtin sphere2 -L 4      exit 0, definitive
  koszul-cy space check-pd --builtin rp2_min --scalar fp:2
  koszul-cy space betti --builtin rp2_min --scalar z   torsion [2] in degree 1
  koszul-cy coalg betti-compare --builtin s2 -L 4
  koszul-cy alg smooth-cy-on-bar --builtin dual_numbers -L 5
  koszul-cy selftest --cases 20
        """,
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # ── lie ──
    lie_parser = subparsers.add_parser("lie", help="Lie algebra checks")
    lie_sub = lie_parser.add_subparsers(dest="action")
    for name, func, text in (("unimodular", cmd_lie_unimodular, "is tr(ad x) = 0"),
                             ("check-cy", cmd_lie_check_cy, "proper CY check of C_*(g)"),
                             ("betti", cmd_lie_betti, "CE homology ranks")):
        p = lie_sub.add_parser(name, help=text)
        add_run_options(p)
        p.set_defaults(func=func)

    # ── space ──
    space_parser = subparsers.add_parser("space", help="Triangulated space checks")
    space_sub = space_parser.add_subparsers(dest="action")
    for name, func, text in (("check-pd", cmd_space_check_pd, "Poincare duality with local systems"),
                             ("check-cy", cmd_space_check_cy, "proper CY check of the chain coalgebra"),
                             ("pi1", cmd_space_pi1, "fundamental group"),
                             ("betti", cmd_space_betti, "simplicial homology")):
        p = space_sub.add_parser(name, help=text)
        add_run_options(p)
        p.add_argument("--base-vertex", type=int, default=0, help="base vertex of the spanning tree")
        p.add_argument("--system", action="append", default=None, help="local_system document (repeatable)")
        p.set_defaults(func=func)

    # ── coalg ──
    coalg_parser = subparsers.add_parser("coalg", help="dg coalgebra computations")
    coalg_sub = coalg_parser.add_subparsers(dest="action")
    for name, func, text in (("cobar", cmd_coalg_cobar, "cobar homology"),
                             ("betti-compare", cmd_coalg_betti_compare, "coHH(C) against HH(Omega C)"),
                             ("cohh", cmd_coalg_cohh, "cocyclic homology ranks"),
                             ("check-cy", cmd_coalg_check_cy, "proper CY check of a supplied class")):
        p = coalg_sub.add_parser(name, help=text)
        add_run_options(p)
        p.set_defaults(func=func)

    # ── alg ──
    alg_parser = subparsers.add_parser("alg", help="Frobenius algebra checks")
    alg_sub = alg_parser.add_subparsers(dest="action")
    for name, func, text in (("check-proper-cy", cmd_alg_check_proper_cy, "trace pairing and A -> A*[n]"),
                             ("smooth-cy-on-bar", cmd_alg_smooth_cy_on_bar, "the trace map on the bar side")):
        p = alg_sub.add_parser(name, help=text)
        add_run_options(p)
        p.add_argument("-n", type=int, default=None, help="CY dimension (default: the document's, else 0)")
        p.set_defaults(func=func)

    # ── selftest ──
    selftest_parser = subparsers.add_parser("selftest", help="Run the structural identity suite")
    add_run_options(selftest_parser, source=False)
    selftest_parser.add_argument("--seed", type=int, default=None, help="random seed")
    selftest_parser.add_argument("--cases", type=int, default=None, help="number of random cases")
    selftest_parser.set_defaults(func=cmd_selftest)

    # ── replay ──
    replay_parser = subparsers.add_parser("replay", help="Re-verify a saved report")
    replay_parser.add_argument("path", help="report JSON file")
    add_run_options(replay_parser, source=False)
    replay_parser.set_defaults(func=cmd_replay)

    # ── version ──
    version_parser = subparsers.add_parser("version", help="Show version information")
    version_parser.set_defaults(func=cmd_version)

    return parser


def configure_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, settings.reports.LOG_LEVEL.upper(), logging.WARNING),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )


def report_error(exc: KoszulError):
    print(json.dumps({"error": type(exc).__name__, "message": exc.message,
                      "context": exc.context}, sort_keys=True, default=str), file=sys.stderr)


def run(argv=None) -> int:
    """Parse arguments, dispatch, and map the outcome to an exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(getattr(args, "verbose", False))

    if not args.command:
        parser.print_help()
        return EXIT_OK
    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_INPUT

    try:
        cfg = run_config(args) if args.command != "version" else None
        return args.func(args, cfg)
    except (InputError, StructureError) as exc:
        report_error(exc)
        return EXIT_INPUT
    except ComputationError as exc:
        report_error(exc)
        logger.error("internal consistency failure: %s", exc.message)
        return EXIT_INTERNAL
    except Exception:
        logger.exception("unexpected error")
        return EXIT_INTERNAL


def main():
    """Main CLI entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
