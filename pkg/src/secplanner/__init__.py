"""Cybersecurity investment planning with the Gordon-Loeb model.

Per-segment optimal investments, customizable breach probability functions,
ROSI-ranked protection recommendations, document persistence, and an HTTP/CLI
surface for the companion UI.
"""

__version__ = "0.1.0"

from .econ import (  # noqa: F401
    BpfKind,
    BpfSpec,
    GridSpec,
    OptimalResult,
    PortfolioPlan,
    Segment,
    SegmentType,
    ebis,
    effective_breach_prob,
    enbis,
    enbis_table,
    eval_bpf,
    expected_loss,
    loss_grid,
    optimal_investment,
    plan_portfolio,
)
from .bpf import (  # noqa: F401
    ProbeGrid,
    ValidationReport,
    WeightVector,
    compare_bpfs,
    compile_custom,
    validate_bpf,
    weighted_default,
)
from .expr import BpfExpression, eval_expression, parse_bpf  # noqa: F401
from .rosi import IncidentProfile, RosiReport, ale, rank_by_rosi, rosi  # noqa: F401
from .recommender import (  # noqa: F401
    AttackType,
    Demand,
    LeasingPeriod,
    ProtectionOffer,
    Recommendation,
    attach_rosi,
    match_protections,
)
from .valuation import (  # noqa: F401
    ValuationTable,
    ValueEstimate,
    estimate_value,
    override_value,
)
