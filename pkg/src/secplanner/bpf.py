"""Validation, weighting, and comparison of breach probability functions.

Validation is probe-based: a deterministic grid of (z, v) points is pushed
through the candidate function and each property is checked numerically, with
the first failing point recorded as a witness. Mandatory checks guard the
assumptions the investment optimizer relies on (range, the S(0, v) = v anchor,
monotone non-increase in z); convexity and log-convexity are advisory because
a numeric probe cannot prove them, only refute them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

from .econ import (
    DEFAULT_ALPHA,
    DEFAULT_TOL,
    BpfKind,
    BpfSpec,
    Segment,
    eval_bpf,
    optimal_investment,
)
from .errors import InvalidInput, SecplannerError
from .expr import BpfExpression, parse_bpf

ANCHOR_TOLERANCE = 1e-9
MONOTONICITY_SLACK = 0.0
CONVEXITY_SLACK = 1e-6

MANDATORY_CHECKS = ("evaluation", "range", "anchor", "monotonicity")
ADVISORY_CHECKS = ("convexity", "log_convexity", "productivity")


class ValidationFailed(SecplannerError):
    code = "validation_failed"

    def __init__(self, report: "ValidationReport"):
        failed = [c.name for c in report.checks if not c.passed]
        super().__init__(
            f"BPF failed validation checks: {', '.join(failed)}",
            details={"checks": [c.as_dict() for c in report.checks]},
        )
        self.report = report


@dataclass(frozen=True)
class WeightVector:
    """Multiplicative weights on the default family's variables."""

    w_v: float = 1.0
    w_z: float = 1.0
    w_alpha: float = 1.0

    def __post_init__(self):
        for name, value in (("w_v", self.w_v), ("w_z", self.w_z), ("w_alpha", self.w_alpha)):
            if not value > 0.0:
                raise InvalidInput(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class ProbeGrid:
    """Deterministic (z, v) sample the validator sweeps."""

    L_total: float = 100_000.0
    L_i: float = 100_000.0
    alpha: float = DEFAULT_ALPHA
    z_count: int = 25
    v_values: tuple[float, ...] = tuple(round(0.05 * k, 2) for k in range(1, 20))

    def __post_init__(self):
        if self.z_count < 3:
            raise InvalidInput("probe needs at least 3 investment levels")
        if self.z_count * len(self.v_values) < 200:
            raise InvalidInput("probe must cover at least 200 points")

    @property
    def z_points(self) -> tuple[float, ...]:
        step = self.L_total / (self.z_count - 1)
        return tuple(k * step for k in range(self.z_count))

    def describe(self) -> str:
        return (
            f"z: {self.z_count} even steps on [0, {self.L_total}], "
            f"v: {{{self.v_values[0]}..{self.v_values[-1]}}} ({len(self.v_values)} levels), "
            f"L={self.L_total}, L_i={self.L_i}, alpha={self.alpha}"
        )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: Optional[dict] = None
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "witness": self.witness, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    checks: tuple[CheckResult, ...]
    probe_grid: str

    def check(self, name: str) -> CheckResult:
        for result in self.checks:
            if result.name == name:
                return result
        raise KeyError(name)


def validate_bpf(expr: BpfExpression, probe: Optional[ProbeGrid] = None) -> ValidationReport:
    """Probe a custom expression; evaluation errors become failed checks, not exceptions."""
    probe = probe or ProbeGrid()

    def surface(z: float, v: float) -> float:
        return expr.evaluate(
            {"z": z, "v": v, "L": probe.L_total, "L_i": probe.L_i, "alpha": probe.alpha}
        )

    return _run_checks(surface, probe)


def validate_spec(spec: BpfSpec, probe: Optional[ProbeGrid] = None) -> ValidationReport:
    """Probe any BpfSpec; custom specs are probed as raw expressions so range
    violations surface in the range check rather than as evaluation errors."""
    probe = probe or ProbeGrid()
    if spec.kind is BpfKind.CUSTOM:
        assert spec.expression is not None
        return validate_bpf(spec.expression, replace(probe, alpha=spec.alpha))

    def surface(z: float, v: float) -> float:
        return eval_bpf(spec, z, v, probe.L_total, probe.L_i)

    return _run_checks(surface, probe)


def weighted_default(
    weights: WeightVector, alpha: float = DEFAULT_ALPHA, probe: Optional[ProbeGrid] = None
) -> BpfSpec:
    """Build the weighted variant of the default family, re-validated before use."""
    spec = BpfSpec(
        kind=BpfKind.WEIGHTED_DEFAULT,
        alpha=alpha,
        weights={"w_v": weights.w_v, "w_z": weights.w_z, "w_alpha": weights.w_alpha},
    )
    report = validate_spec(spec, probe)
    if not report.passed:
        raise ValidationFailed(report)
    return spec


def compile_custom(
    source: str, alpha: float = DEFAULT_ALPHA, probe: Optional[ProbeGrid] = None
) -> BpfSpec:
    """Parse and validate expression text into a usable custom BPF."""
    expr = parse_bpf(source)
    report = validate_bpf(expr, probe)
    if not report.passed:
        raise ValidationFailed(report)
    return BpfSpec.custom(expr, alpha=alpha)


def spec_from_config(config: dict) -> BpfSpec:
    """Build a validated BpfSpec from a BpfConfig document payload."""
    kind = BpfKind(config.get("kind", BpfKind.DEFAULT_GL.value))
    alpha = float(config.get("alpha", DEFAULT_ALPHA))
    if kind is BpfKind.DEFAULT_GL:
        return BpfSpec.default(alpha)
    if kind is BpfKind.WEIGHTED_DEFAULT:
        weights = config.get("weights") or {}
        return weighted_default(WeightVector(**weights), alpha)
    return compile_custom(config.get("expression_source", ""), alpha)


@dataclass(frozen=True)
class ComparisonRow:
    z: float
    breach_probs: tuple[float, ...]


@dataclass(frozen=True)
class BpfComparison:
    rows: tuple[ComparisonRow, ...]
    z_stars: tuple[float, ...]


def compare_bpfs(
    specs: Sequence[BpfSpec],
    segment: Segment,
    L_total: Optional[float] = None,
    grid: Optional[Sequence[float]] = None,
    tol: float = DEFAULT_TOL,
) -> BpfComparison:
    """Evaluate several (validated) BPFs side by side on one segment.

    Column order follows input order; each spec also gets its own optimum.
    """
    if len(specs) < 2:
        raise InvalidInput("comparison needs at least two BPFs")
    total = segment.value if L_total is None else L_total
    v_eff = segment.risk * segment.vulnerability
    if grid is None:
        grid = [k * (v_eff * segment.value) / 10.0 for k in range(11)]

    rows = tuple(
        ComparisonRow(
            z=float(z),
            breach_probs=tuple(
                eval_bpf(spec, float(z), v_eff, total, segment.value) for spec in specs
            ),
        )
        for z in grid
    )
    z_stars = tuple(optimal_investment(segment, spec, total, tol).z_star for spec in specs)
    return BpfComparison(rows=rows, z_stars=z_stars)


def _run_checks(surface: Callable[[float, float], float], probe: ProbeGrid) -> ValidationReport:
    zs = probe.z_points
    values: dict[tuple[int, int], float] = {}
    eval_failure: Optional[CheckResult] = None

    for j, v in enumerate(probe.v_values):
        for k, z in enumerate(zs):
            try:
                values[(j, k)] = surface(z, v)
            except SecplannerError as error:
                if eval_failure is None:
                    eval_failure = CheckResult(
                        "evaluation",
                        False,
                        witness={"z": z, "v": v, "error": error.message},
                        detail="expression failed to evaluate on the probe grid",
                    )
            except (ArithmeticError, ValueError) as error:
                if eval_failure is None:
                    eval_failure = CheckResult(
                        "evaluation", False, witness={"z": z, "v": v, "error": str(error)}
                    )

    checks = [eval_failure or CheckResult("evaluation", True)]
    checks.append(_check_range(values, zs, probe))
    checks.append(_check_anchor(values, zs, probe))
    checks.append(_check_monotonicity(values, zs, probe))
    checks.append(_check_convexity(values, zs, probe, log_scale=False))
    checks.append(_check_convexity(values, zs, probe, log_scale=True))
    checks.append(_check_productivity(values, zs, probe))

    passed = all(c.passed for c in checks if c.name in MANDATORY_CHECKS)
    return ValidationReport(passed=passed, checks=tuple(checks), probe_grid=probe.describe())


def _check_range(values, zs, probe) -> CheckResult:
    for j, v in enumerate(probe.v_values):
        for k, z in enumerate(zs):
            s = values.get((j, k))
            if s is not None and not 0.0 <= s <= 1.0:
                return CheckResult(
                    "range", False, witness={"z": z, "v": v, "value": s},
                    detail="S must stay within [0, 1]",
                )
    return CheckResult("range", True)


def _check_anchor(values, zs, probe) -> CheckResult:
    for j, v in enumerate(probe.v_values):
        s0 = values.get((j, 0))
        if s0 is not None and abs(s0 - v) > ANCHOR_TOLERANCE:
            return CheckResult(
                "anchor", False, witness={"z": 0.0, "v": v, "value": s0},
                detail=f"S(0, v) must equal v within {ANCHOR_TOLERANCE}",
            )
    return CheckResult("anchor", True)


def _check_monotonicity(values, zs, probe) -> CheckResult:
    for j, v in enumerate(probe.v_values):
        for k in range(len(zs) - 1):
            a, b = values.get((j, k)), values.get((j, k + 1))
            if a is not None and b is not None and b - a > MONOTONICITY_SLACK:
                return CheckResult(
                    "monotonicity", False,
                    witness={"v": v, "z1": zs[k], "z2": zs[k + 1], "s1": a, "s2": b},
                    detail="S must be non-increasing in z",
                )
    return CheckResult("monotonicity", True)


def _check_convexity(values, zs, probe, log_scale: bool) -> CheckResult:
    name = "log_convexity" if log_scale else "convexity"
    for j, v in enumerate(probe.v_values):
        for k in range(1, len(zs) - 1):
            triple = [values.get((j, k - 1)), values.get((j, k)), values.get((j, k + 1))]
            if any(s is None for s in triple):
                continue
            if log_scale:
                if any(s <= 0.0 for s in triple):
                    continue
                triple = [math.log(s) for s in triple]
            second_diff = triple[0] - 2.0 * triple[1] + triple[2]
            if second_diff < -CONVEXITY_SLACK:
                return CheckResult(
                    name, False,
                    witness={"v": v, "z": zs[k], "second_difference": second_diff},
                    detail="advisory: second difference dipped below tolerance",
                )
    return CheckResult(name, True)


def _check_productivity(values, zs, probe) -> CheckResult:
    last = len(zs) - 1
    for j in range(len(probe.v_values)):
        s0, s_end = values.get((j, 0)), values.get((j, last))
        if s0 is not None and s_end is not None and s_end < s0:
            return CheckResult("productivity", True)
    return CheckResult(
        "productivity", False, witness={"z_max": zs[last]},
        detail="advisory: investment never reduced the breach probability",
    )
