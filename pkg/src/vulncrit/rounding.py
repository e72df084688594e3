"""Decimal half-up rounding shared by the scoring stages."""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal


def round_half_up(value: float | Decimal, places: int) -> float:
    """Round to `places` fractional digits, halves away from zero.

    Floats are interpreted through their shortest decimal repr, so 0.56
    means 0.56, not its binary expansion.
    """
    quantum = Decimal(1).scaleb(-places)
    dec = value if isinstance(value, Decimal) else Decimal(str(value))
    return float(dec.quantize(quantum, rounding=ROUND_HALF_UP))


def as_decimal(value: float | Decimal) -> Decimal:
    """Exact Decimal view of a value carrying decimal intent."""
    return value if isinstance(value, Decimal) else Decimal(str(value))
