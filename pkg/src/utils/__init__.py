"""
Utility functions for parsing command-line integers and rationals and for shaping output rows.
"""

import re
from fractions import Fraction
from typing import Iterable, Optional, Tuple

import pandas as pd

from ..core.arith import factorize
from ..core.exceptions import InvalidExpressionError
from ..core.state import ClassificationRecord, Factorization

_DECIMAL = re.compile(r"\d+")
_FERMAT_FORM = re.compile(r"2\^(\d+)\+1")
_POWER = re.compile(r"(\d+)\^(\d+)")

CSV_COLUMNS = ["n", "member", "witness", "rules"]


def parse_integer_expression(
    text: str, timeout: Optional[float] = 10.0
) -> Tuple[int, Optional[Factorization]]:
    """
    Parse a positive integer written as a decimal literal, 2^m+1 or p^k.

    Underscores and surrounding whitespace are ignored. For p^k the base is factored
    (it is small in practice) and the exponents multiplied, so n itself is never factored.

    Args:
        text: Expression to parse
        timeout: Factorization budget for the base of p^k

    Returns:
        (value, factorization hint or None)

    Raises:
        InvalidExpressionError: text matches none of the accepted forms
    """
    compact = text.strip().replace("_", "").replace(" ", "")
    if _DECIMAL.fullmatch(compact):
        value = int(compact)
        if value < 1:
            raise InvalidExpressionError(f"{text!r} is not a positive integer")
        return value, None

    match = _FERMAT_FORM.fullmatch(compact)
    if match:
        m = int(match.group(1))
        if m < 1:
            raise InvalidExpressionError("2^m+1 needs m >= 1")
        return (1 << m) + 1, None

    match = _POWER.fullmatch(compact)
    if match:
        base, exponent = int(match.group(1)), int(match.group(2))
        if base < 2 or exponent < 1:
            raise InvalidExpressionError("p^k needs p >= 2 and k >= 1")
        return base ** exponent, factorize(base, timeout=timeout).power(exponent)

    raise InvalidExpressionError(f"cannot parse {text!r}; expected digits, 2^m+1 or p^k")


def parse_rational(text: str) -> Fraction:
    """Parse '0.00082', '41/50000' or '8.2e-4' exactly."""
    try:
        return Fraction(text.strip().replace("_", ""))
    except (ValueError, ZeroDivisionError):
        raise InvalidExpressionError(f"{text!r} is not a rational literal") from None


def record_row(record: ClassificationRecord) -> dict:
    """One CSV row: n, member, witness, rules (semicolon separated)."""
    return {
        "n": str(record.n),
        "member": "true" if record.member else "false",
        "witness": "" if record.witness_prime is None else str(record.witness_prime),
        "rules": ";".join(tag.value for tag in record.rules_fired),
    }


def records_frame(records: Iterable[ClassificationRecord]) -> pd.DataFrame:
    """Classification records as a string-typed DataFrame with the CSV columns."""
    return pd.DataFrame([record_row(r) for r in records], columns=CSV_COLUMNS, dtype=str)
