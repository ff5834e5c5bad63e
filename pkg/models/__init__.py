from models.report import CYReport, Identity, IdentityKind, MatrixWitness, Obstruction, Verdict

__all__ = [
    "CYReport", "Identity", "IdentityKind", "MatrixWitness", "Obstruction", "Verdict",
]
