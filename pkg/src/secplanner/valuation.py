"""Segment value estimation from type-specific parameter tables.

Tables are data, not code: each segment type maps to (parameter, unit, dollar
rate, provenance) rows, and an estimate is the exact decimal sum of
quantity * rate over the supplied parameters. The shipped defaults are
placeholders (provenance "placeholder") to be replaced with figures from
breach-cost reports; users can always override the estimated total.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import Decimal
from typing import Mapping, Optional

from .econ import SegmentType
from .errors import InvalidInput, SecplannerError


class UnknownParameter(SecplannerError):
    code = "unknown_parameter"


class MissingTableForType(SecplannerError):
    code = "missing_table_for_type"


class NonPositiveOverride(SecplannerError):
    code = "non_positive_override"


@dataclass(frozen=True)
class RateEntry:
    parameter: str
    unit: str
    rate: Decimal  # dollars per unit
    provenance: str

    def __post_init__(self):
        if self.rate < 0:
            raise InvalidInput(f"rate for {self.parameter} must be >= 0")
        if not self.provenance:
            raise InvalidInput(f"rate for {self.parameter} needs a provenance note")


@dataclass(frozen=True)
class ValuationTable:
    entries: Mapping[str, tuple[RateEntry, ...]]  # segment type -> ordered rows

    def __post_init__(self):
        for type_name, rows in self.entries.items():
            names = [row.parameter for row in rows]
            if len(names) != len(set(names)):
                raise InvalidInput(f"duplicate parameter names for type {type_name}")

    def for_type(self, segment_type: SegmentType | str) -> tuple[RateEntry, ...]:
        key = segment_type.value if isinstance(segment_type, SegmentType) else segment_type
        try:
            return self.entries[key]
        except KeyError:
            raise MissingTableForType(f"no valuation table for segment type {key!r}") from None

    @classmethod
    def default(cls) -> "ValuationTable":
        placeholder = "placeholder"
        return cls(
            entries={
                SegmentType.DATABASE.value: (
                    RateEntry("sensitive_records", "record", Decimal("150.00"), placeholder),
                    RateEntry("anonymized_records", "record", Decimal("0.05"), placeholder),
                ),
                SegmentType.WEB_SERVER.value: (
                    RateEntry("downtime_hours", "hour", Decimal("500.00"), placeholder),
                    RateEntry("daily_transactions", "transaction/day", Decimal("2.50"), placeholder),
                ),
                SegmentType.NETWORK.value: (
                    RateEntry("connected_devices", "device", Decimal("80.00"), placeholder),
                    RateEntry("downtime_hours", "hour", Decimal("350.00"), placeholder),
                ),
                SegmentType.OTHER.value: (
                    RateEntry("declared_value", "USD", Decimal("1.00"), placeholder),
                ),
            }
        )


@dataclass(frozen=True)
class BreakdownLine:
    parameter: str
    quantity: Decimal
    rate: Decimal
    subtotal: Decimal


@dataclass(frozen=True)
class ValueEstimate:
    total: Decimal
    breakdown: tuple[BreakdownLine, ...]
    overridden: bool = False


def estimate_value(
    segment_type: SegmentType | str,
    params: Mapping[str, float | int | str | Decimal],
    table: Optional[ValuationTable] = None,
) -> ValueEstimate:
    """Sum quantity * rate over the supplied parameters, in table order."""
    table = table or ValuationTable.default()
    rows = table.for_type(segment_type)
    if not params:
        raise InvalidInput("at least one valuation parameter must be supplied")
    known = {row.parameter: row for row in rows}
    for name in params:
        if name not in known:
            raise UnknownParameter(
                f"parameter {name!r} is not defined for segment type "
                f"{segment_type.value if isinstance(segment_type, SegmentType) else segment_type}",
                details={"parameter": name},
            )

    breakdown = []
    total = Decimal("0")
    for row in rows:  # deterministic: table order
        if row.parameter not in params:
            continue
        quantity = Decimal(str(params[row.parameter]))
        if quantity < 0:
            raise InvalidInput(f"quantity for {row.parameter} must be >= 0")
        subtotal = quantity * row.rate
        breakdown.append(
            BreakdownLine(parameter=row.parameter, quantity=quantity, rate=row.rate, subtotal=subtotal)
        )
        total += subtotal
    return ValueEstimate(total=total, breakdown=tuple(breakdown), overridden=False)


def override_value(estimate: ValueEstimate, manual: float | str | Decimal) -> ValueEstimate:
    """Replace the estimated total with a user-chosen value, keeping the breakdown."""
    manual = Decimal(str(manual))
    if manual <= 0:
        raise NonPositiveOverride(f"manual value must be positive, got {manual}")
    return replace(estimate, total=manual, overridden=True)
