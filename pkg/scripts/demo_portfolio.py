#!/usr/bin/env python3
"""Walk a three-segment company through the full planning flow.

Run: python scripts/demo_portfolio.py
"""

from secplanner import (
    BpfSpec,
    GridSpec,
    Segment,
    SegmentType,
    enbis_table,
    estimate_value,
    plan_portfolio,
)
from secplanner.money import usd

segments = [
    Segment(name="Customers Database", segment_type=SegmentType.DATABASE,
            value=float(estimate_value(SegmentType.DATABASE,
                                       {"sensitive_records": 1000,
                                        "anonymized_records": 20000}).total),
            risk=0.6, vulnerability=0.08),
    Segment(name="Marketplace Server", segment_type=SegmentType.WEB_SERVER,
            value=220_000.0, risk=0.45, vulnerability=0.25),
    Segment(name="Internal Operations Network", segment_type=SegmentType.NETWORK,
            value=90_000.0, risk=0.3, vulnerability=0.4),
]

plan = plan_portfolio(segments, BpfSpec.default(), tol=1e-4)

print(f"{'segment':<30} {'value':>14} {'v_eff':>7} {'expected loss':>14} {'z*':>12} {'ENBIS*':>12}")
for segment, (segment_id, result) in zip(segments, plan.per_segment):
    v_eff = segment.risk * segment.vulnerability
    print(
        f"{segment.name:<30} {usd(segment.value):>14} {v_eff:>7.3f}"
        f" {usd(result.expected_loss_no_investment):>14}"
        f" {usd(result.z_star):>12} {usd(result.enbis_at_optimum):>12}"
    )
print(f"\ntotal optimal investment: {usd(plan.total_investment)}")
print(f"total net benefit:        {usd(plan.total_enbis)}")
print(f"without segmentation:     {usd(plan.aggregate_result.enbis_at_optimum)}"
      f" (v̄ = {plan.aggregate_v_eff:.4f})")
print(f"segmentation benefit:     {usd(plan.segmentation_benefit)}")

print("\nENBIS exploration for the database segment:")
db = segments[0]
rows = enbis_table(db, BpfSpec.default(), grid=GridSpec.linear(0.0, 2500.0, 6),
                   extra_points=[1234.0])
print(f"{'z':>12} {'EBIS':>12} {'ENBIS':>12} {'S(z)':>9}")
for row in rows:
    marker = "  <== optimal" if row.is_optimal else ""
    print(f"{usd(row.z):>12} {usd(row.ebis):>12} {usd(row.enbis):>12} {row.breach_prob:>9.4f}{marker}")
