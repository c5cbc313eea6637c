"""Investment engine tests: frozen oracle values plus property sweeps.

Expected numbers marked as oracle-frozen were computed with the brute-force
grid oracle in oracles.py (direct formula substitution) before the engine
existed, then frozen here.
"""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secplanner.econ import (
    BpfSpec,
    CustomBpfRangeError,
    DivisionDegenerate,
    EmptyPortfolio,
    GridSpec,
    NonUnimodalWarning,
    Segment,
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
from secplanner.errors import InvalidInput
from secplanner.expr import parse_bpf

from oracles import closed_form_enbis_star, closed_form_zstar, enbis_direct, grid_search_zstar

DEFAULT = BpfSpec.default()


def seg(value, v_eff=None, risk=1.0, vulnerability=None, name="segment"):
    if v_eff is not None:
        risk, vulnerability = 1.0, v_eff
    return Segment(name=name, value=value, risk=risk, vulnerability=vulnerability)


# --- effective breach probability and expected loss ---------------------------


def test_effective_breach_prob_examples():
    assert effective_breach_prob(seg(1000, risk=0.0, vulnerability=0.9)) == 0.0
    assert effective_breach_prob(seg(1000, risk=1.0, vulnerability=0.08)) == 0.08
    assert effective_breach_prob(seg(1000, risk=0.5, vulnerability=0.4)) == pytest.approx(0.2)


def test_expected_loss_examples():
    assert expected_loss(seg(50000, risk=0.5, vulnerability=0.4)) == pytest.approx(10000.0)
    assert expected_loss(seg(50000, risk=0.0, vulnerability=0.7)) == 0.0
    assert expected_loss(seg(320000, risk=1.0, vulnerability=1.0)) == 320000.0


def test_segment_validation():
    with pytest.raises(InvalidInput):
        Segment(name="", value=1000, risk=0.5, vulnerability=0.5)
    with pytest.raises(InvalidInput):
        Segment(name="x", value=-1, risk=0.5, vulnerability=0.5)
    with pytest.raises(InvalidInput):
        Segment(name="x", value=1, risk=1.2, vulnerability=0.5)


# --- eval_bpf ------------------------------------------------------------------


def test_eval_bpf_at_zero_returns_v():
    for L_total, L_i in [(100000.0, 100000.0), (200000.0, 50000.0)]:
        assert eval_bpf(DEFAULT, 0.0, 0.5, L_total, L_i) == 0.5


def test_eval_bpf_direct_substitution():
    # 0.5 / (1 + (1/200) * (100 / 0.5)) = 0.25, hand-checked
    assert eval_bpf(DEFAULT, 100.0, 0.5, 200000.0, 100000.0) == pytest.approx(0.25, abs=1e-15)


def test_eval_bpf_large_investment_limit():
    assert eval_bpf(DEFAULT, 1e9, 0.5, 100000.0, 100000.0) < 1e-3


def test_eval_bpf_degenerate_value():
    with pytest.raises(DivisionDegenerate):
        eval_bpf(DEFAULT, 100.0, 0.5, 100000.0, 0.0)


def test_eval_bpf_rejects_total_below_segment():
    with pytest.raises(InvalidInput):
        eval_bpf(DEFAULT, 100.0, 0.5, 1000.0, 2000.0)


def test_eval_bpf_custom_range_error():
    spec = BpfSpec.custom(parse_bpf("v + z"))
    with pytest.raises(CustomBpfRangeError):
        eval_bpf(spec, 10.0, 0.5, 100000.0, 100000.0)


@given(
    z1=st.floats(0.0, 1e6),
    z2=st.floats(0.0, 1e6),
    v=st.floats(0.001, 1.0),
    L_i=st.floats(100.0, 1e7),
)
@settings(max_examples=200)
def test_eval_bpf_non_increasing_in_z(z1, z2, v, L_i):
    lo, hi = sorted((z1, z2))
    assert eval_bpf(DEFAULT, hi, v, L_i, L_i) <= eval_bpf(DEFAULT, lo, v, L_i, L_i)


@given(
    z=st.floats(0.0, 1e6),
    v=st.floats(0.001, 1.0),
    L_i=st.floats(100.0, 1e6),
    scale=st.floats(1.0, 50.0),
)
@settings(max_examples=200)
def test_eval_bpf_invariant_to_total_value(z, v, L_i, scale):
    # the total value cancels in the default family's composition
    assert eval_bpf(DEFAULT, z, v, L_i, L_i) == eval_bpf(DEFAULT, z, v, L_i * scale, L_i)


def test_monotone_in_z_random_pairs():
    rng = random.Random(7)
    for _ in range(1000):
        z1, z2 = sorted(rng.uniform(0, 1e6) for _ in range(2))
        v = rng.uniform(0.001, 1.0)
        assert eval_bpf(DEFAULT, z2, v, 1e5, 1e5) <= eval_bpf(DEFAULT, z1, v, 1e5, 1e5)


# --- EBIS / ENBIS ----------------------------------------------------------------


def test_ebis_zero_investment_zero_benefit():
    assert ebis(seg(100000, v_eff=0.5), 0.0, DEFAULT) == 0.0


def test_ebis_at_near_optimal_point():
    # oracle-frozen: direct Eq-substitution at z = 2136.07 gives 47763.934045
    value = ebis(seg(100000, v_eff=0.5), 2136.07, DEFAULT, 100000.0)
    assert value == pytest.approx(47763.93404499859, abs=1e-6)


def test_ebis_zero_vulnerability():
    for z in (0.0, 100.0, 1e6):
        assert ebis(seg(100000, v_eff=0.0), z, DEFAULT) == 0.0


def test_enbis_values():
    segment = seg(100000, v_eff=0.5)
    assert enbis(segment, 0.0, DEFAULT) == 0.0
    # oracle-frozen: 47763.934045 - 2136.07
    assert enbis(segment, 2136.07, DEFAULT) == pytest.approx(45627.86404499859, abs=1e-6)
    assert enbis(segment, 10 * 100000.0, DEFAULT) < 0.0


# --- optimal investment -----------------------------------------------------------


def test_optimal_matches_closed_form_and_oracle_reference_case():
    result = optimal_investment(seg(100000, v_eff=0.5), DEFAULT, tol=1e-6)
    closed = closed_form_zstar(0.5, 100000.0)  # 2136.06797749979
    assert result.z_star == pytest.approx(closed, rel=1e-6)
    assert result.z_star == pytest.approx(grid_search_zstar(0.5, 100000.0), abs=0.01)
    assert result.enbis_at_optimum == pytest.approx(45627.86404500042, abs=1e-4)
    assert result.converged
    assert result.expected_loss_no_investment == pytest.approx(50000.0)


def test_optimal_second_reference_case():
    result = optimal_investment(seg(50000, v_eff=0.2), DEFAULT, tol=1e-6)
    assert result.z_star == pytest.approx(657.1067811865476, rel=1e-6)
    assert result.z_star == pytest.approx(grid_search_zstar(0.2, 50000.0), abs=0.01)


def test_optimal_clamps_below_alpha():
    result = optimal_investment(seg(100000, v_eff=0.0005), DEFAULT, tol=1e-6)
    assert result.z_star == 0.0
    assert result.enbis_at_optimum == 0.0
    assert result.converged
    assert grid_search_zstar(0.0005, 100000.0) == 0.0


def test_optimal_degenerate_inputs_no_error():
    for segment in (seg(0.0, v_eff=0.5, name="no value"), seg(100000.0, v_eff=0.0, name="no risk")):
        result = optimal_investment(segment, DEFAULT)
        assert result.z_star == 0.0
        assert result.enbis_at_optimum == 0.0
        assert result.bound_ratio == 0.0


def test_optimal_rejects_bad_tol():
    with pytest.raises(InvalidInput):
        optimal_investment(seg(1000, v_eff=0.5), DEFAULT, tol=0.0)


def test_optimal_bound_ratio_below_inv_e():
    rng = random.Random(99)
    for _ in range(200):
        L_i = 10 ** rng.uniform(3, 7)
        v = rng.uniform(0.001, 0.999)
        result = optimal_investment(seg(L_i, v_eff=v), DEFAULT)
        assert result.bound_ratio <= 1.0 / math.e + 1e-9


def test_optimal_vs_grid_oracle_seeded_sample():
    rng = random.Random(424242)
    for _ in range(25):
        L_i = 10 ** rng.uniform(3, 6)
        v = rng.uniform(0.01, 0.99)
        result = optimal_investment(seg(L_i, v_eff=v), DEFAULT, tol=1e-6)
        oracle = grid_search_zstar(v, L_i)
        assert abs(result.z_star - oracle) <= max(0.01, 1e-3 * oracle)


def test_optimal_enbis_never_negative():
    rng = random.Random(5)
    for _ in range(100):
        L_i = 10 ** rng.uniform(1, 7)
        v = rng.uniform(0.0, 1.0)
        result = optimal_investment(seg(L_i, v_eff=v), DEFAULT)
        assert result.enbis_at_optimum >= 0.0


def test_non_unimodal_custom_flagged():
    # valid BPF (range, anchor, monotone hold) whose ENBIS has two humps:
    # a steep early drop, a flat shelf, then a second productive drop
    source = "v * (1 - 0.4 * (z / (z + 200)) - 0.6 * (z^4 / (z^4 + 60000^4)))"
    spec = BpfSpec.custom(parse_bpf(source))
    segment = seg(200000, v_eff=0.8)
    with pytest.warns(NonUnimodalWarning):
        result = optimal_investment(segment, spec, tol=1.0)
    assert not result.converged
    assert result.z_star >= 0.0


# --- ENBIS exploration table --------------------------------------------------------


def test_enbis_table_single_point_grid():
    rows = enbis_table(seg(100000, v_eff=0.5), DEFAULT, grid=GridSpec.of(0.0))
    assert len(rows) == 1
    row = rows[0]
    assert (row.z, row.ebis, row.enbis) == (0.0, 0.0, 0.0)
    assert row.breach_prob == 0.5
    assert row.is_optimal  # nearest-to-z* among the provided points


def test_enbis_table_flags_nearest_to_optimum():
    rows = enbis_table(
        seg(100000, v_eff=0.5), DEFAULT, grid=GridSpec.of(0.0, 1000.0, 2136.07, 5000.0)
    )
    flagged = [row for row in rows if row.is_optimal]
    assert len(flagged) == 1
    assert flagged[0].z == 2136.07
    best_enbis = max(row.enbis for row in rows)
    assert flagged[0].enbis == best_enbis


def test_enbis_table_custom_point_below_optimum():
    rows = enbis_table(
        seg(100000, v_eff=0.5),
        DEFAULT,
        grid=GridSpec.of(0.0, 1000.0, 2136.07, 5000.0),
        extra_points=[2000.0],
    )
    by_z = {row.z: row for row in rows}
    assert 2000.0 in by_z
    assert by_z[2000.0].enbis < by_z[2136.07].enbis
    assert sum(row.is_optimal for row in rows) == 1


def test_enbis_table_rejects_negative_grid():
    with pytest.raises(InvalidInput):
        GridSpec.of(-1.0, 5.0)
    with pytest.raises(InvalidInput):
        GridSpec.of(5.0, 1.0)


# --- loss grid -------------------------------------------------------------------


def test_loss_grid_single_cell():
    assert loss_grid([100000.0], [0.5]) == [[50000.0]]


def test_loss_grid_zero_column_and_shape():
    grid = loss_grid([1000.0, 2000.0], [0.0, 0.5, 1.0])
    assert len(grid) == 2 and all(len(row) == 3 for row in grid)
    assert grid[0][0] == 0.0 and grid[1][0] == 0.0
    assert grid[1][2] == 2000.0


def test_loss_grid_matches_expected_loss_of_synthetic_segments():
    values = [1500.0, 98000.0, 4.0]
    vulns = [0.05, 0.5, 0.99]
    grid = loss_grid(values, vulns)
    for i, value in enumerate(values):
        for j, v in enumerate(vulns):
            synthetic = Segment(name="synthetic", value=value, risk=1.0, vulnerability=v)
            assert grid[i][j] == expected_loss(synthetic)


def test_loss_grid_rejects_empty():
    with pytest.raises(InvalidInput):
        loss_grid([], [0.5])


# --- portfolio -----------------------------------------------------------------


def test_single_segment_portfolio_has_no_benefit():
    plan = plan_portfolio([seg(100000, v_eff=0.5)], DEFAULT)
    assert plan.segmentation_benefit == pytest.approx(0.0, abs=0.01)
    assert plan.total_investment == pytest.approx(plan.per_segment[0][1].z_star)


def test_two_segment_reference_portfolio():
    # oracle-frozen: per-segment ENBIS sum 91714.7186, aggregate 91255.7281
    segments = [seg(100000, v_eff=0.8, name="hot"), seg(100000, v_eff=0.2, name="cold")]
    plan = plan_portfolio(segments, DEFAULT, tol=1e-6)
    assert plan.total_enbis == pytest.approx(91714.71862576144, abs=0.01)
    assert plan.aggregate_result.enbis_at_optimum == pytest.approx(91255.72809000085, abs=0.01)
    assert plan.segmentation_benefit == pytest.approx(458.99, abs=0.5)
    assert plan.aggregate_v_eff == pytest.approx(0.5)
    assert plan.total_investment == pytest.approx(
        sum(result.z_star for _, result in plan.per_segment)
    )


def test_identical_vulnerabilities_have_no_benefit():
    segments = [seg(50000, v_eff=0.3, name=f"s{k}") for k in range(4)]
    plan = plan_portfolio(segments, DEFAULT)
    assert abs(plan.segmentation_benefit) <= 0.05


def test_segmentation_benefit_never_negative_random():
    rng = random.Random(31337)
    for _ in range(50):
        count = rng.randint(2, 8)
        segments = [
            seg(10 ** rng.uniform(3, 6), v_eff=rng.uniform(0.01, 0.99), name=f"s{k}")
            for k in range(count)
        ]
        plan = plan_portfolio(segments, DEFAULT)
        assert plan.segmentation_benefit >= -0.01


def test_empty_portfolio_rejected():
    with pytest.raises(EmptyPortfolio):
        plan_portfolio([], DEFAULT)


def test_enbis_closed_form_cross_check():
    # ENBIS* = L_i (sqrt(v) - sqrt(alpha))^2 for the default family
    rng = random.Random(11)
    for _ in range(50):
        L_i = 10 ** rng.uniform(3, 6)
        v = rng.uniform(0.01, 0.99)
        result = optimal_investment(seg(L_i, v_eff=v), DEFAULT, tol=1e-6)
        assert result.enbis_at_optimum == pytest.approx(closed_form_enbis_star(v, L_i), rel=1e-9)
        direct = float(enbis_direct(result.z_star, v, L_i))
        assert result.enbis_at_optimum == pytest.approx(direct, rel=1e-12)
