"""
Koszul CY Toolkit - Exception hierarchy.

Every error contract of the toolkit maps to one class below. The CLI turns
InputError subclasses into exit code 2 and anything else into exit code 1.
"""

from typing import Any, Dict, Optional


class KoszulError(Exception):
    """Root of all toolkit errors."""

    def __init__(self, message: str = "", context: Optional[Dict[str, Any]] = None):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.context = dict(context or {})

    def __str__(self):
        if not self.context:
            return self.message
        details = ", ".join(f"{k}={v}" for k, v in sorted(self.context.items()))
        return f"{self.message} ({details})"


# ── Input errors (exit code 2) ──────────────────────────────────


class InputError(KoszulError):
    """Bad user input: schema violations, unknown built-ins, bad parameters."""


class SchemaError(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class DomainMismatch(InputError):
    pass


class IntegerRankRequest(InputError):
    pass


class GradingMismatch(InputError):
    pass


class WindowNotTrusted(InputError):
    pass


class InfiniteRank(InputError):
    pass


class InfiniteRankSource(InfiniteRank):
    pass


class NotAugmented(InputError):
    pass


class NotPure(InputError):
    pass


class Disconnected(InputError):
    pass


class ModelInvalid(InputError):
    pass


# ── Structural errors (the data does not satisfy an axiom) ──────


class StructureError(KoszulError):
    pass


class DifferentialNotSquareZero(StructureError):
    pass


class NotAChainMap(StructureError):
    pass


class NotConilpotent(StructureError):
    pass


class NotCoassociative(StructureError):
    pass


class NotAssociative(StructureError):
    pass


class LeibnizViolated(StructureError):
    pass


class MaurerCartanViolated(StructureError):
    pass


class JacobiViolated(StructureError):
    pass


class RelationViolated(StructureError):
    pass


class NotOrientable(StructureError):
    pass


class NotACycle(StructureError):
    pass


class DegenerateTrace(StructureError):
    pass


# ── Internal consistency ────────────────────────────────────────


class ComputationError(KoszulError):
    pass


class VerdictMismatch(ComputationError):
    """Two independent routes to the same theorem disagreed. Always a bug."""


class ReplayFailed(ComputationError):
    pass
