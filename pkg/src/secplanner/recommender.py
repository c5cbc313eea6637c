"""Budget-aware protection matching with ROSI inputs attached.

A local filter-and-score stand-in for an external recommendation engine:
offers are filtered on attack type, budget, and the optional region/leasing
demands, then scored by a documented linear blend of mitigation strength and
price headroom. The weights are configuration, not truth; swap them per
deployment.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

from .errors import InvalidInput, SecplannerError
from .money import require_money, require_probability
from .rosi import IncidentProfile, RosiReport, rosi

MONTHS_PER_YEAR = 12


class EmptyCatalog(SecplannerError):
    code = "empty_catalog"


class MissingIncidentProfile(SecplannerError):
    code = "missing_incident_profile"


class AttackType(str, Enum):
    PHISHING = "Phishing"
    DDOS = "DDoS"
    RANSOMWARE = "Ransomware"
    DATA_BREACH = "DataBreach"
    MALWARE = "Malware"
    INSIDER = "Insider"


class LeasingPeriod(str, Enum):
    MONTHLY = "Monthly"
    ANNUAL = "Annual"


@dataclass(frozen=True)
class ProtectionOffer:
    """A purchasable protection from the catalog."""

    id: str
    name: str
    attack_types: frozenset[AttackType]
    price: float  # per leasing period
    leasing_period: LeasingPeriod = LeasingPeriod.ANNUAL
    mitigation_ratio: float = 0.0
    regions: frozenset[str] = field(default_factory=frozenset)
    default_incident: Optional[IncidentProfile] = None

    def __post_init__(self):
        if not self.attack_types:
            raise InvalidInput(f"offer {self.id!r} needs at least one attack type")
        if not self.price > 0.0:
            raise InvalidInput(f"offer {self.id!r} price must be positive")
        require_probability(self.mitigation_ratio, "mitigation_ratio")

    @property
    def annual_cost(self) -> float:
        """Price normalized to a year; ROSI is an annual metric."""
        if self.leasing_period is LeasingPeriod.MONTHLY:
            return self.price * MONTHS_PER_YEAR
        return self.price


@dataclass(frozen=True)
class Demand:
    attack_type: AttackType
    budget: float
    region: Optional[str] = None
    leasing_period: Optional[LeasingPeriod] = None

    def __post_init__(self):
        if not self.budget > 0.0:
            raise InvalidInput(f"budget must be positive, got {self.budget}")


@dataclass(frozen=True)
class MatchWeights:
    """Score = mitigation_weight * mitigation + headroom_weight * (1 - price/budget)."""

    mitigation_weight: float = 0.7
    headroom_weight: float = 0.3


@dataclass(frozen=True)
class RosiInputs:
    profile: Optional[IncidentProfile]
    mitigation: float
    cost: float  # annualized


@dataclass(frozen=True)
class Recommendation:
    offer: ProtectionOffer
    score: float
    rosi_inputs: RosiInputs
    rosi_report: Optional[RosiReport] = None


def match_protections(
    demand: Demand,
    catalog: Sequence[ProtectionOffer],
    limit: int = 5,
    weights: MatchWeights = MatchWeights(),
) -> list[Recommendation]:
    """Filter the catalog against a demand and rank by score, best first.

    Ordering is deterministic: descending score, then ascending price, then
    offer id. Every returned offer respects the budget.
    """
    if not catalog:
        raise EmptyCatalog("protection catalog is empty")
    if limit < 1:
        raise InvalidInput(f"limit must be >= 1, got {limit}")
    require_money(demand.budget, "budget")

    matches = []
    for offer in catalog:
        if demand.attack_type not in offer.attack_types:
            continue
        if offer.price > demand.budget:
            continue
        if demand.region is not None and demand.region not in offer.regions:
            continue
        if demand.leasing_period is not None and offer.leasing_period is not demand.leasing_period:
            continue
        score = (
            weights.mitigation_weight * offer.mitigation_ratio
            + weights.headroom_weight * (1.0 - offer.price / demand.budget)
        )
        matches.append(
            Recommendation(
                offer=offer,
                score=score,
                rosi_inputs=RosiInputs(
                    profile=offer.default_incident,
                    mitigation=offer.mitigation_ratio,
                    cost=offer.annual_cost,
                ),
            )
        )
    matches.sort(key=lambda rec: (-rec.score, rec.offer.price, rec.offer.id))
    return matches[:limit]


def attach_rosi(
    rec: Recommendation,
    profile: Optional[IncidentProfile] = None,
    mitigation: Optional[float] = None,
) -> Recommendation:
    """Compute the ROSI report for a recommendation, honoring user overrides."""
    effective_profile = profile or rec.rosi_inputs.profile
    if effective_profile is None:
        raise MissingIncidentProfile(
            f"offer {rec.offer.id!r} has no default incident profile and no override was given",
            details={"offer_id": rec.offer.id},
        )
    effective_mitigation = rec.rosi_inputs.mitigation if mitigation is None else mitigation
    report = rosi(effective_profile, effective_mitigation, rec.rosi_inputs.cost)
    return replace(rec, rosi_report=report)
