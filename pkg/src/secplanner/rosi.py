"""Annual loss expectancy and return on security investment.

ROSI measures prevented loss rather than profit:

    ALE  = ARO * SLE
    ROSI = (ALE * mitigation - cost) / cost

A protection is cost-effective when ROSI >= 1. ARO is a yearly occurrence
rate and may exceed 1 (three phishing waves a year is ARO = 3).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidInput, SecplannerError
from .money import require_money, require_probability

COST_EFFECTIVE_THRESHOLD = 1.0


class ZeroCost(SecplannerError):
    code = "zero_cost"


@dataclass(frozen=True)
class IncidentProfile:
    """Yearly incident rate and dollar loss per incident."""

    aro: float  # occurrences per year
    sle: float  # single loss exposure, dollars

    def __post_init__(self):
        if not self.aro >= 0.0:
            raise InvalidInput(f"aro must be non-negative, got {self.aro}")
        require_money(self.sle, "sle")


@dataclass(frozen=True)
class RosiReport:
    """Cost-effectiveness verdict for one protection, inputs echoed."""

    ale: float
    risk_reduction: float
    rosi: float
    cost_effective: bool
    aro: float
    sle: float
    mitigation: float
    cost: float


def ale(profile: IncidentProfile) -> float:
    """Annual loss expectancy in dollars."""
    return profile.aro * profile.sle


def rosi(profile: IncidentProfile, mitigation: float, cost: float) -> RosiReport:
    """Score one protection against an incident profile."""
    require_probability(mitigation, "mitigation")
    if not cost > 0.0:
        raise ZeroCost(f"protection cost must be positive, got {cost}")
    annual_loss = ale(profile)
    risk_reduction = annual_loss * mitigation
    value = (risk_reduction - cost) / cost
    return RosiReport(
        ale=annual_loss,
        risk_reduction=risk_reduction,
        rosi=value,
        cost_effective=value >= COST_EFFECTIVE_THRESHOLD,
        aro=profile.aro,
        sle=profile.sle,
        mitigation=mitigation,
        cost=cost,
    )


def rank_by_rosi(
    candidates: Sequence[tuple[str, IncidentProfile, float, float]],
) -> list[tuple[str, RosiReport]]:
    """Order (offer id, profile, mitigation, cost) tuples by descending ROSI.

    Ties break toward the cheaper offer, then lexicographic id; the result is
    a permutation of the input and deterministic across runs.
    """
    scored = []
    for offer_id, profile, mitigation, cost in candidates:
        if not cost > 0.0:
            raise ZeroCost(
                f"offer {offer_id!r} has non-positive cost {cost}",
                details={"offer_id": offer_id},
            )
        scored.append((offer_id, rosi(profile, mitigation, cost)))
    scored.sort(key=lambda item: (-item[1].rosi, item[1].cost, item[0]))
    return scored
