"""
tests/test_core.py
~~~~~~~~~~~~~~~~~~
Engine settings, rational literals, result hashing and the exception codes.
"""
from fractions import Fraction

import pytest
from rest_framework import serializers

from apps.core.exceptions import CapacityError, GraphError, InputRangeError, MonogamyError, ParseError, SolverInconclusive
from apps.core.serializers import FractionField
from apps.core.utils import ResultHasher, engine_setting, format_fraction, parse_fraction


class TestEngineSetting:

    def test_default_from_settings(self):
        assert engine_setting("TK_MAX_K") == 6

    def test_override_wins(self):
        assert engine_setting("TK_MAX_K", 3) == 3

    def test_fixture_override(self, engine_settings):
        engine_settings(NPA_SOLVER="SCS")
        assert engine_setting("NPA_SOLVER") == "SCS"


class TestFractions:

    @pytest.mark.parametrize("text, expected", [
        ("3/4", Fraction(3, 4)),
        (" 5/6 ", Fraction(5, 6)),
        ("2", Fraction(2)),
        (7, Fraction(7)),
    ])
    def test_parse(self, text, expected):
        assert parse_fraction(text) == expected

    @pytest.mark.parametrize("text", ["one", "1/0", ""])
    def test_parse_rejects(self, text):
        with pytest.raises(InputRangeError):
            parse_fraction(text)

    def test_format(self):
        assert format_fraction(Fraction(17, 18)) == "17/18"
        assert format_fraction(Fraction(4, 4)) == "1"

    def test_field(self):
        field = FractionField()
        assert field.to_internal_value("35/36") == Fraction(35, 36)
        with pytest.raises(serializers.ValidationError):
            field.to_internal_value("x/y")


class TestResultHasher:

    def test_key_order_does_not_matter(self):
        assert ResultHasher.generate_hash({"a": 1, "b": [1, 2]}) == ResultHasher.generate_hash({"b": [1, 2], "a": 1})

    def test_different_payloads(self):
        assert ResultHasher.generate_hash({"level": "1"}) != ResultHasher.generate_hash({"level": "2"})


class TestExitCodes:

    @pytest.mark.parametrize("error, code", [
        (MonogamyError, 1),
        (InputRangeError, 2),
        (GraphError, 2),
        (ParseError, 2),
        (CapacityError, 3),
        (SolverInconclusive, 4),
    ])
    def test_codes(self, error, code):
        assert error.exit_code == code

    def test_input_errors_are_value_errors(self):
        assert issubclass(ParseError, ValueError)
