"""giuga-half - membership and density of the odd n with sum j^((n-1)/2) = 0 (mod n)."""

__version__ = "0.1.0"

from .core.state import (
    ClassificationRecord,
    DensityReport,
    EngineSettings,
    Factorization,
    MembershipVerdict,
    Progression,
    SieveResult,
    ValidationReport,
)

__all__ = [
    "ClassificationRecord",
    "DensityReport",
    "EngineSettings",
    "Factorization",
    "MembershipVerdict",
    "Progression",
    "SieveResult",
    "ValidationReport",
]
