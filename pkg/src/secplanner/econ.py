"""Gordon-Loeb investment engine with information segmentation.

Implements breach-probability evaluation, EBIS/ENBIS, the per-segment optimal
investment search, exploration grids, and portfolio aggregation. The default
breach probability function is the hyperbolic family

    S(z, v) = v / (1 + z / (alpha * L_i))        alpha = 0.001

which is the per-segment composition S(z / (L_i / L), v) of the base function
v / (1 + z / (L * alpha)); the total value L cancels, so the default family
depends on the segment value L_i only. Custom expressions receive the composed
investment and may reference L and L_i explicitly.

The optimizer is a bracketed golden-section maximizer of ENBIS on
[0, v_eff * L_i] with an absolute dollar tolerance, clamped to zero when the
net benefit has non-positive slope at the origin. The closed form
z* = L_i (sqrt(alpha v) - alpha) exists for the default family and is used in
tests as a cross-check, never as the computation path (custom functions have
no closed form).
"""

from __future__ import annotations

import math
import uuid
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

from .errors import InvalidInput, SecplannerError
from .expr import BpfExpression
from .money import require_money, require_probability

DEFAULT_ALPHA = 0.001
DEFAULT_TOL = 0.01  # dollars

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_MAX_GOLDEN_ITERATIONS = 400
_UNIMODALITY_SAMPLES = 64


class DivisionDegenerate(SecplannerError):
    """Breach probability requested for a segment with no value (L_i = 0)."""

    code = "division_degenerate"


class CustomBpfRangeError(SecplannerError):
    """A custom expression produced a value outside [0, 1]."""

    code = "custom_bpf_range"


class EmptyPortfolio(SecplannerError):
    code = "empty_portfolio"


class NonUnimodalWarning(UserWarning):
    """A custom BPF failed the unimodality probe; the result is best-effort."""


class SegmentType(str, Enum):
    WEB_SERVER = "WebServer"
    NETWORK = "Network"
    DATABASE = "Database"
    OTHER = "Other"


class BpfKind(str, Enum):
    DEFAULT_GL = "DefaultGL"
    WEIGHTED_DEFAULT = "WeightedDefault"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class Segment:
    """An information/technical business area with value, attack risk, and vulnerability."""

    name: str
    segment_type: SegmentType = SegmentType.OTHER
    value: float = 0.0  # L_i, dollars
    risk: float = 0.0  # probability of an attack occurring
    vulnerability: float = 0.0  # probability an attack succeeds
    id: str = field(default_factory=lambda: uuid.uuid4().hex)

    def __post_init__(self):
        if not self.name:
            raise InvalidInput("segment name must be non-empty")
        require_money(self.value, "segment value")
        require_probability(self.risk, "risk")
        require_probability(self.vulnerability, "vulnerability")


@dataclass(frozen=True)
class BpfSpec:
    """A breach probability function: the built-in family, a weighted variant, or a custom expression."""

    kind: BpfKind = BpfKind.DEFAULT_GL
    alpha: float = DEFAULT_ALPHA
    weights: Optional[dict[str, float]] = None  # {"w_v", "w_z", "w_alpha"}, WeightedDefault only
    expression: Optional[BpfExpression] = None  # Custom only

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise InvalidInput(f"alpha must be positive, got {self.alpha}")
        if self.kind is BpfKind.WEIGHTED_DEFAULT:
            if not self.weights:
                raise InvalidInput("WeightedDefault needs weights")
            for key in ("w_v", "w_z", "w_alpha"):
                if not self.weights.get(key, 0.0) > 0.0:
                    raise InvalidInput(f"weight {key} must be positive")
        if self.kind is BpfKind.CUSTOM and self.expression is None:
            raise InvalidInput("Custom BPF needs a parsed expression")

    @classmethod
    def default(cls, alpha: float = DEFAULT_ALPHA) -> "BpfSpec":
        return cls(kind=BpfKind.DEFAULT_GL, alpha=alpha)

    @classmethod
    def custom(cls, expression: BpfExpression, alpha: float = DEFAULT_ALPHA) -> "BpfSpec":
        return cls(kind=BpfKind.CUSTOM, alpha=alpha, expression=expression)


@dataclass(frozen=True)
class OptimalResult:
    """Optimizer output for one segment."""

    z_star: float
    enbis_at_optimum: float
    breach_prob_at_optimum: float
    expected_loss_no_investment: float
    bound_ratio: float  # z* / expected loss; <= 1/e for the default family
    converged: bool
    iterations: int


@dataclass(frozen=True)
class GridSpec:
    """Ascending, non-negative investment grid for ENBIS exploration."""

    points: tuple[float, ...]

    def __post_init__(self):
        if not self.points:
            raise InvalidInput("grid needs at least one point")
        previous = -1.0
        for z in self.points:
            if z < 0.0:
                raise InvalidInput(f"grid points must be non-negative, got {z}")
            if z <= previous:
                raise InvalidInput("grid points must be strictly ascending")
            previous = z

    @classmethod
    def of(cls, *points: float) -> "GridSpec":
        return cls(points=tuple(float(z) for z in points))

    @classmethod
    def linear(cls, lo: float, hi: float, count: int) -> "GridSpec":
        if count < 2 or hi <= lo:
            raise InvalidInput("linear grid needs count >= 2 and hi > lo")
        step = (hi - lo) / (count - 1)
        return cls(points=tuple(lo + k * step for k in range(count)))


@dataclass(frozen=True)
class EnbisRow:
    z: float
    ebis: float
    enbis: float
    breach_prob: float
    is_optimal: bool


@dataclass(frozen=True)
class PortfolioPlan:
    """Per-segment optima plus the no-segmentation baseline."""

    per_segment: tuple[tuple[str, OptimalResult], ...]
    total_investment: float
    total_enbis: float
    aggregate_result: OptimalResult
    aggregate_v_eff: float  # value-weighted mean vulnerability used for the baseline
    segmentation_benefit: float


def effective_breach_prob(segment: Segment) -> float:
    """Joint probability that an attack occurs and succeeds."""
    return segment.risk * segment.vulnerability


def expected_loss(segment: Segment) -> float:
    """Expected dollar loss with zero security investment."""
    return effective_breach_prob(segment) * segment.value


def eval_bpf(bpf: BpfSpec, z: float, v: float, L_total: float, L_i: float) -> float:
    """Breach probability of a segment worth ``L_i`` (of ``L_total``) after investing ``z``.

    The segment composition scales the investment by L_total / L_i before the
    base function sees it. For the built-in family that scaling cancels with
    the 1/(L*alpha) productivity term, leaving v / (1 + z / (alpha * L_i)).
    """
    if z < 0.0:
        raise InvalidInput(f"investment must be non-negative, got {z}")
    require_probability(v, "vulnerability")
    if L_i <= 0.0:
        raise DivisionDegenerate("segment value L_i must be positive to evaluate a BPF")
    if L_total < L_i:
        raise InvalidInput(f"L_total ({L_total}) must be >= L_i ({L_i})")

    if bpf.kind is BpfKind.DEFAULT_GL:
        s = v / (1.0 + z / (bpf.alpha * L_i))
        return min(max(s, 0.0), v)
    if bpf.kind is BpfKind.WEIGHTED_DEFAULT:
        w = bpf.weights or {}
        return (w["w_v"] * v) / (1.0 + (w["w_z"] * z) / ((w["w_alpha"] * bpf.alpha) * L_i))

    assert bpf.expression is not None
    z_eff = z * (L_total / L_i)
    s = bpf.expression.evaluate(
        {"z": z_eff, "v": v, "L": L_total, "L_i": L_i, "alpha": bpf.alpha}
    )
    if not -1e-12 <= s <= 1.0 + 1e-12:
        raise CustomBpfRangeError(
            f"custom BPF evaluated to {s} outside [0, 1]",
            details={"z": z, "v": v, "L": L_total, "L_i": L_i, "value": s},
        )
    return min(max(s, 0.0), 1.0)


def ebis(segment: Segment, z: float, bpf: BpfSpec, L_total: Optional[float] = None) -> float:
    """Expected benefit of investing ``z``: the reduction in expected loss."""
    v_eff = effective_breach_prob(segment)
    if v_eff == 0.0 or segment.value == 0.0:
        return 0.0
    total = segment.value if L_total is None else L_total
    s = eval_bpf(bpf, z, v_eff, total, segment.value)
    return (v_eff - s) * segment.value


def enbis(segment: Segment, z: float, bpf: BpfSpec, L_total: Optional[float] = None) -> float:
    """Expected net benefit: EBIS minus the amount invested. May be negative."""
    return ebis(segment, z, bpf, L_total) - z


def _golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float
) -> tuple[float, int, bool]:
    """Locate the maximum of a unimodal function on [lo, hi].

    Returns (argmax, iterations, bracket shrank below tol).
    """
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    iterations = 0
    while (b - a) > tol and iterations < _MAX_GOLDEN_ITERATIONS:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        iterations += 1
    return 0.5 * (a + b), iterations, (b - a) <= tol


def _probe_unimodality(f: Callable[[float], float], lo: float, hi: float) -> bool:
    """Coarse check that f rises to a single hump then falls on [lo, hi]."""
    step = (hi - lo) / (_UNIMODALITY_SAMPLES - 1)
    values = [f(lo + k * step) for k in range(_UNIMODALITY_SAMPLES)]
    falling = False
    for previous, current in zip(values, values[1:]):
        if current < previous:
            falling = True
        elif current > previous and falling:
            return False
    return True


def optimal_investment(
    segment: Segment,
    bpf: BpfSpec,
    L_total: Optional[float] = None,
    tol: float = DEFAULT_TOL,
) -> OptimalResult:
    """Maximize ENBIS over z in [0, v_eff * L_i] by golden-section search.

    Degenerate segments (zero value or zero effective breach probability)
    yield a zero investment without error. The result is clamped to z* = 0
    whenever the net benefit already has non-positive slope at the origin,
    which for the default family happens exactly when v_eff <= alpha.
    """
    if not tol > 0.0:
        raise InvalidInput(f"tol must be positive, got {tol}")
    v_eff = effective_breach_prob(segment)
    loss = expected_loss(segment)
    if loss <= 0.0:
        return OptimalResult(
            z_star=0.0,
            enbis_at_optimum=0.0,
            breach_prob_at_optimum=v_eff,
            expected_loss_no_investment=loss,
            bound_ratio=0.0,
            converged=True,
            iterations=0,
        )

    total = segment.value if L_total is None else L_total

    def net_benefit(z: float) -> float:
        return enbis(segment, z, bpf, total)

    unimodal = True
    if bpf.kind is BpfKind.CUSTOM:
        unimodal = _probe_unimodality(net_benefit, 0.0, loss)
        if not unimodal:
            warnings.warn(
                f"custom BPF is not unimodal on [0, {loss}]; optimum is best-effort",
                NonUnimodalWarning,
                stacklevel=2,
            )

    # clamp when investing the first (tiny) dollar already loses money; the
    # probe scales with the expected loss so S(h) stays float-resolvable
    probe_step = max(loss * 1e-9, 1e-12)
    if net_benefit(probe_step) <= 0.0:
        z_star, iterations, bracketed = 0.0, 0, True
    else:
        z_star, iterations, bracketed = _golden_section_max(net_benefit, 0.0, loss, tol)

    enbis_star = net_benefit(z_star)
    if enbis_star <= 0.0:
        z_star, enbis_star = 0.0, 0.0

    return OptimalResult(
        z_star=z_star,
        enbis_at_optimum=enbis_star,
        breach_prob_at_optimum=eval_bpf(bpf, z_star, v_eff, total, segment.value),
        expected_loss_no_investment=loss,
        bound_ratio=z_star / loss,
        converged=bracketed and unimodal,
        iterations=iterations,
    )


def enbis_table(
    segment: Segment,
    bpf: BpfSpec,
    L_total: Optional[float] = None,
    grid: Optional[GridSpec] = None,
    extra_points: Iterable[float] = (),
    tol: float = DEFAULT_TOL,
) -> list[EnbisRow]:
    """Evaluate EBIS/ENBIS/S on a grid; flag the single row nearest the optimum.

    ``extra_points`` lets callers append custom investments to a stock grid;
    the merged rows come back ascending in z.
    """
    if grid is None:
        upper = max(expected_loss(segment), 1.0)
        grid = GridSpec.linear(0.0, upper, 11)
    zs = sorted({*grid.points, *(float(z) for z in extra_points)})
    for z in zs:
        if z < 0.0:
            raise InvalidInput(f"grid points must be non-negative, got {z}")

    optimum = optimal_investment(segment, bpf, L_total, tol)
    v_eff = effective_breach_prob(segment)
    total = segment.value if L_total is None else L_total
    nearest = min(range(len(zs)), key=lambda k: (abs(zs[k] - optimum.z_star), zs[k]))

    rows = []
    for k, z in enumerate(zs):
        benefit = ebis(segment, z, bpf, total)
        if segment.value > 0.0 and v_eff > 0.0:
            s = eval_bpf(bpf, z, v_eff, total, segment.value)
        else:
            s = v_eff
        rows.append(
            EnbisRow(z=z, ebis=benefit, enbis=benefit - z, breach_prob=s, is_optimal=(k == nearest))
        )
    return rows


def loss_grid(values: Sequence[float], vulnerabilities: Sequence[float]) -> list[list[float]]:
    """Expected-loss matrix: cell (i, j) = values[i] * vulnerabilities[j]."""
    if not values or not vulnerabilities:
        raise InvalidInput("loss grid needs at least one value and one vulnerability")
    for value in values:
        require_money(value, "value")
    for v in vulnerabilities:
        require_probability(v, "vulnerability")
    return [[value * v for v in vulnerabilities] for value in values]


def plan_portfolio(
    segments: Sequence[Segment], bpf: BpfSpec, tol: float = DEFAULT_TOL
) -> PortfolioPlan:
    """Optimize every segment against L_total = sum(L_i), plus the one-segment baseline.

    The baseline treats all information as a single segment whose vulnerability
    is the value-weighted mean of the per-segment effective probabilities, which
    preserves the total expected loss.
    """
    if not segments:
        raise EmptyPortfolio("portfolio needs at least one segment")
    L_total = sum(s.value for s in segments)
    if L_total <= 0.0:
        raise InvalidInput("portfolio total value must be positive")

    per_segment = tuple(
        (segment.id, optimal_investment(segment, bpf, L_total, tol)) for segment in segments
    )
    total_investment = sum(result.z_star for _, result in per_segment)
    total_enbis = sum(result.enbis_at_optimum for _, result in per_segment)

    # mathematically <= 1; min() guards a last-ulp rounding overshoot
    v_bar = min(sum(s.value * effective_breach_prob(s) for s in segments) / L_total, 1.0)
    aggregate_segment = Segment(
        name="aggregate",
        segment_type=SegmentType.OTHER,
        value=L_total,
        risk=1.0,
        vulnerability=v_bar,
        id="__aggregate__",
    )
    aggregate = optimal_investment(aggregate_segment, bpf, L_total, tol)

    return PortfolioPlan(
        per_segment=per_segment,
        total_investment=total_investment,
        total_enbis=total_enbis,
        aggregate_result=aggregate,
        aggregate_v_eff=v_bar,
        segmentation_benefit=total_enbis - aggregate.enbis_at_optimum,
    )
