"""Money serialization: cents only at the boundary, full precision inside."""

import pytest

from secplanner.errors import InvalidInput
from secplanner.money import money_str, parse_money, require_probability, usd


def test_money_str_rounds_to_cents():
    assert money_str(2136.0679775) == "2136.07"
    assert money_str(0) == "0.00"
    assert money_str(45627.864045) == "45627.86"
    assert money_str(-950004.9995) == "-950005.00"
    assert money_str(0.005) == "0.01"


def test_parse_money_accepts_strings_and_numbers():
    assert parse_money("151000.00") == 151000.0
    assert parse_money(25) == 25.0
    with pytest.raises(InvalidInput):
        parse_money("-5")
    with pytest.raises(InvalidInput):
        parse_money("12,50")


def test_usd_rendering():
    assert usd(2136.0679775) == "$2,136.07"
    assert usd(0) == "$0.00"


def test_probability_bounds():
    assert require_probability(0.0) == 0.0
    assert require_probability(1.0) == 1.0
    with pytest.raises(InvalidInput):
        require_probability(1.0000001)
    with pytest.raises(InvalidInput):
        require_probability(-0.1)
