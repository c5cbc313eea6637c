"""Wire serialization shared by the HTTP API and the CLI's --json output.

Dollar amounts go out as decimal strings rounded to cents; probabilities,
ratios, and scores stay raw floats. Rounding happens here and nowhere else.
"""

from __future__ import annotations

from .bpf import BpfComparison, ValidationReport
from .econ import EnbisRow, OptimalResult, PortfolioPlan
from .money import money_str
from .recommender import Recommendation
from .rosi import RosiReport
from .valuation import ValueEstimate


def optimal_result_json(result: OptimalResult) -> dict:
    return {
        "z_star": money_str(result.z_star),
        "enbis_at_optimum": money_str(result.enbis_at_optimum),
        "breach_prob_at_optimum": result.breach_prob_at_optimum,
        "expected_loss_no_investment": money_str(result.expected_loss_no_investment),
        "bound_ratio": result.bound_ratio,
        "converged": result.converged,
        "iterations": result.iterations,
    }


def plan_json(plan: PortfolioPlan) -> dict:
    return {
        "per_segment": [
            {"segment_id": segment_id, "optimal": optimal_result_json(result)}
            for segment_id, result in plan.per_segment
        ],
        "total_investment": money_str(plan.total_investment),
        "total_enbis": money_str(plan.total_enbis),
        "aggregate_result": optimal_result_json(plan.aggregate_result),
        "aggregate_v_eff": plan.aggregate_v_eff,
        "segmentation_benefit": money_str(plan.segmentation_benefit),
    }


def enbis_rows_json(rows: list[EnbisRow]) -> list[dict]:
    return [
        {
            "z": money_str(row.z),
            "ebis": money_str(row.ebis),
            "enbis": money_str(row.enbis),
            "breach_prob": row.breach_prob,
            "is_optimal": row.is_optimal,
        }
        for row in rows
    ]


def validation_report_json(report: ValidationReport) -> dict:
    return {
        "passed": report.passed,
        "checks": [check.as_dict() for check in report.checks],
        "probe_grid": report.probe_grid,
    }


def comparison_json(comparison: BpfComparison) -> dict:
    return {
        "rows": [
            {"z": money_str(row.z), "breach_probs": list(row.breach_probs)}
            for row in comparison.rows
        ],
        "z_stars": [money_str(z) for z in comparison.z_stars],
    }


def rosi_report_json(report: RosiReport) -> dict:
    return {
        "ale": money_str(report.ale),
        "risk_reduction": money_str(report.risk_reduction),
        "rosi": report.rosi,
        "cost_effective": report.cost_effective,
        "inputs": {
            "aro": report.aro,
            "sle": money_str(report.sle),
            "mitigation": report.mitigation,
            "cost": money_str(report.cost),
        },
    }


def recommendation_json(rec: Recommendation) -> dict:
    offer = rec.offer
    incident = rec.rosi_inputs.profile
    return {
        "offer": {
            "id": offer.id,
            "name": offer.name,
            "attack_types": sorted(t.value for t in offer.attack_types),
            "regions": sorted(offer.regions),
            "price": money_str(offer.price),
            "leasing_period": offer.leasing_period.value,
            "mitigation_ratio": offer.mitigation_ratio,
        },
        "score": rec.score,
        "rosi_inputs": {
            "aro": incident.aro if incident else None,
            "sle": money_str(incident.sle) if incident else None,
            "mitigation": rec.rosi_inputs.mitigation,
            "cost": money_str(rec.rosi_inputs.cost),
        },
        "rosi_report": rosi_report_json(rec.rosi_report) if rec.rosi_report else None,
    }


def estimate_json(estimate: ValueEstimate) -> dict:
    return {
        "total": money_str(estimate.total),
        "breakdown": [
            {
                "parameter": line.parameter,
                "quantity": str(line.quantity),
                "rate": str(line.rate),
                "subtotal": money_str(line.subtotal),
            }
            for line in estimate.breakdown
        ],
        "overridden": estimate.overridden,
    }
