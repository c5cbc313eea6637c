#!/usr/bin/env python3
"""Validate a custom breach probability function and compare it to the default.

Run: python scripts/bpf_playground.py ["v / (1 + (z / (L * alpha)) ^ 1.2)"]
"""

import sys

from secplanner import BpfSpec, Segment, compare_bpfs, parse_bpf, validate_bpf
from secplanner.money import usd

source = sys.argv[1] if len(sys.argv) > 1 else "v / (1 + (z / (L * alpha)) ^ 1.2)"
expr = parse_bpf(source)
report = validate_bpf(expr)

print(f"candidate: {source}")
print(f"validation: {'PASSED' if report.passed else 'FAILED'}  ({report.probe_grid})")
for check in report.checks:
    status = "pass" if check.passed else "FAIL"
    suffix = f"  witness: {check.witness}" if not check.passed and check.witness else ""
    print(f"  [{status}] {check.name}{suffix}")

if not report.passed:
    sys.exit(1)

segment = Segment(name="reference", value=100_000.0, risk=1.0, vulnerability=0.5)
comparison = compare_bpfs(
    [BpfSpec.default(), BpfSpec.custom(expr)], segment,
    grid=[0.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0], tol=1e-4,
)
print(f"\n{'z':>12} {'default S':>12} {'candidate S':>12}")
for row in comparison.rows:
    print(f"{usd(row.z):>12} {row.breach_probs[0]:>12.5f} {row.breach_probs[1]:>12.5f}")
print(f"\nz*: default {usd(comparison.z_stars[0])}, candidate {usd(comparison.z_stars[1])}")
