"""Deciding freeness of lattices over orders in rational group algebras."""
from .freeness import (
    FREE, NOT_FREE, NOT_FREE_OVER_MAXORDER, NOT_LOCALLY_FREE, UNKNOWN, FreenessCertificate,
    ProblemInstance, associated_order, is_free, verify_certificate,
)

__all__ = [
    "FREE", "NOT_FREE", "NOT_FREE_OVER_MAXORDER", "NOT_LOCALLY_FREE", "UNKNOWN",
    "FreenessCertificate", "ProblemInstance", "associated_order", "is_free", "verify_certificate",
]
