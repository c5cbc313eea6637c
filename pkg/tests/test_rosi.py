"""ALE and ROSI arithmetic, ranking determinism."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from secplanner.errors import InvalidInput
from secplanner.rosi import IncidentProfile, ZeroCost, ale, rank_by_rosi, rosi


def test_ale_worked_example():
    # phishing striking three times a year at $30,000 a hit
    assert ale(IncidentProfile(aro=3, sle=30000)) == 90000.0


def test_ale_zero_rate():
    assert ale(IncidentProfile(aro=0, sle=30000)) == 0.0


def test_ale_fractional_rate():
    assert ale(IncidentProfile(aro=0.5, sle=10000)) == 5000.0


def test_rosi_worked_example_exact():
    report = rosi(IncidentProfile(aro=3, sle=30000), mitigation=0.5, cost=25000)
    assert report.rosi == 0.8
    assert not report.cost_effective
    assert report.ale == 90000.0
    assert report.risk_reduction == 45000.0


def test_rosi_zero_mitigation_is_pure_loss():
    report = rosi(IncidentProfile(aro=3, sle=30000), mitigation=0.0, cost=12345)
    assert report.rosi == -1.0
    assert not report.cost_effective


def test_rosi_higher_rate_flips_verdict():
    report = rosi(IncidentProfile(aro=4, sle=30000), mitigation=0.5, cost=25000)
    assert report.rosi == pytest.approx(1.4)
    assert report.cost_effective


def test_rosi_rejects_zero_cost():
    with pytest.raises(ZeroCost):
        rosi(IncidentProfile(aro=1, sle=1000), mitigation=0.5, cost=0)


def test_incident_profile_validation():
    with pytest.raises(InvalidInput):
        IncidentProfile(aro=-1, sle=100)
    with pytest.raises(InvalidInput):
        IncidentProfile(aro=1, sle=-100)


def test_rank_singleton():
    ranked = rank_by_rosi([("only", IncidentProfile(3, 30000), 0.5, 25000.0)])
    assert [offer_id for offer_id, _ in ranked] == ["only"]


def test_rank_orders_by_rosi_descending():
    ranked = rank_by_rosi(
        [
            ("weak", IncidentProfile(3, 30000), 0.5, 25000.0),
            ("strong", IncidentProfile(4, 30000), 0.5, 25000.0),
        ]
    )
    assert [offer_id for offer_id, _ in ranked] == ["strong", "weak"]
    assert ranked[0][1].rosi == pytest.approx(1.4)
    assert ranked[1][1].rosi == 0.8


def test_rank_tie_breaks_cheaper_then_id():
    profile_a = IncidentProfile(2, 1000)  # ale 2000
    # equal rosi 0: reduction == cost
    candidates = [
        ("bbb", profile_a, 0.5, 1000.0),
        ("aaa", profile_a, 0.1, 200.0),
        ("ccc", profile_a, 0.1, 200.0),
    ]
    ranked = rank_by_rosi(candidates)
    assert [offer_id for offer_id, _ in ranked] == ["aaa", "ccc", "bbb"]


def test_rank_identifies_zero_cost_offender():
    with pytest.raises(ZeroCost) as excinfo:
        rank_by_rosi([("fine", IncidentProfile(1, 100), 0.5, 10.0),
                      ("broken", IncidentProfile(1, 100), 0.5, 0.0)])
    assert excinfo.value.details["offer_id"] == "broken"


def test_rank_is_permutation_of_input():
    candidates = [
        (f"offer-{k}", IncidentProfile(k % 5, 1000 * (k + 1)), (k % 10) / 10, 100.0 * (k + 1))
        for k in range(20)
    ]
    ranked = rank_by_rosi(candidates)
    assert sorted(offer_id for offer_id, _ in ranked) == sorted(c[0] for c in candidates)


@given(
    aro=st.floats(0.1, 20),
    sle=st.floats(1, 1e6),
    mitigation=st.floats(0.0, 1.0),
    cost_lo=st.floats(1, 1e5),
    cost_hi=st.floats(1, 1e5),
)
def test_rosi_decreasing_in_cost(aro, sle, mitigation, cost_lo, cost_hi):
    lo, hi = sorted((cost_lo, cost_hi))
    if lo == hi:
        return
    profile = IncidentProfile(aro=aro, sle=sle)
    assert rosi(profile, mitigation, lo).rosi >= rosi(profile, mitigation, hi).rosi


@given(
    aro=st.floats(0.1, 20),
    sle=st.floats(1, 1e6),
    cost=st.floats(1, 1e5),
    m1=st.floats(0.0, 1.0),
    m2=st.floats(0.0, 1.0),
)
def test_rosi_linear_in_mitigation(aro, sle, cost, m1, m2):
    profile = IncidentProfile(aro=aro, sle=sle)
    r1 = rosi(profile, m1, cost).rosi
    r2 = rosi(profile, m2, cost).rosi
    mid = rosi(profile, (m1 + m2) / 2.0, cost).rosi
    assert mid == pytest.approx((r1 + r2) / 2.0, rel=1e-9, abs=1e-9)


def test_cost_effective_flips_exactly_at_double_cost():
    profile = IncidentProfile(aro=2, sle=1000)  # ale = 2000
    at_threshold = rosi(profile, 1.0, 1000.0)  # reduction 2000 = 2 * cost
    assert at_threshold.rosi == 1.0
    assert at_threshold.cost_effective
    below = rosi(profile, 1.0, 1000.01)
    assert not below.cost_effective
