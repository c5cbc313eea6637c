"""Money and probability helpers.

Dollar amounts are plain floats carried at full precision through every
computation; rounding to cents happens only when a value is serialized for
display or the wire (decimal strings, never binary floats).
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation, ROUND_HALF_UP

from .errors import InvalidInput

CENTS = Decimal("0.01")


def require_money(amount: float, name: str = "amount") -> float:
    """Validate a non-negative dollar amount."""
    amount = float(amount)
    if not amount >= 0.0:
        raise InvalidInput(f"{name} must be a non-negative dollar amount, got {amount}")
    return amount


def require_probability(value: float, name: str = "probability") -> float:
    """Validate a probability in [0, 1]."""
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise InvalidInput(f"{name} must lie in [0, 1], got {value}")
    return value


def money_str(amount: float | Decimal) -> str:
    """Serialize a dollar amount as a decimal string rounded to cents."""
    if not isinstance(amount, Decimal):
        amount = Decimal(repr(float(amount)))
    return str(amount.quantize(CENTS, rounding=ROUND_HALF_UP))


def parse_money(text: str | float | int, name: str = "amount") -> float:
    """Parse a decimal string (or number) into a float dollar amount."""
    if isinstance(text, (int, float)):
        return require_money(float(text), name)
    try:
        value = float(Decimal(text))
    except (InvalidOperation, ValueError):
        raise InvalidInput(f"{name} is not a decimal amount: {text!r}") from None
    return require_money(value, name)


def usd(amount: float) -> str:
    """Human-facing dollar rendering with thousands separators."""
    quantized = Decimal(repr(float(amount))).quantize(CENTS, rounding=ROUND_HALF_UP)
    return f"${quantized:,}"
