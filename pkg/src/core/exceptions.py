"""
Exception hierarchy for giuga-half.
The CLI maps these onto exit codes (see src/main.py).
"""

from typing import Optional


class GiugaHalfError(Exception):
    """Base class for all library errors."""


class EvenInputError(GiugaHalfError, ValueError):
    """Raised when an even integer reaches an operation defined only for odd n."""

    def __init__(self, n: int):
        self.n = n
        super().__init__(f"{n} is even; membership is only defined for odd n")


class FactorizationTimeout(GiugaHalfError, TimeoutError):
    """Raised when factorization exceeds its time budget."""

    def __init__(self, n: int, budget: float, cofactor: Optional[int] = None):
        self.n = n
        self.budget = budget
        self.cofactor = cofactor
        super().__init__(
            f"factorization of a {n.bit_length()}-bit integer exceeded {budget:.1f}s"
        )


class InvalidExpressionError(GiugaHalfError, ValueError):
    """Raised for integer expressions or rational literals the CLI cannot parse."""


class ConfigurationError(GiugaHalfError, ValueError):
    """Raised when an environment setting has an invalid value."""


class OracleMismatchError(GiugaHalfError, AssertionError):
    """Raised when the brute-force residue disagrees with the characterization."""

    def __init__(self, n: int, residue: int, member: bool):
        self.n = n
        self.residue = residue
        self.member = member
        super().__init__(
            f"oracle disagreement at n={n}: G(n) mod n = {residue}, characterization says member={member}"
        )


class TruncationError(GiugaHalfError, RuntimeError):
    """Raised when the prime-tail decision stays ambiguous at the largest cutoff."""
