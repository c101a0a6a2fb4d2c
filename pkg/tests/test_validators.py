"""
通用校验与错误格式
"""

import numpy as np
import pytest

from flexcast.config import AppConfig, FlexSettings, set_config
from flexcast.utils import validators
from flexcast.utils.exceptions import ConfigError, FlexcastError, ValidationError
from flexcast.utils.validators import (
    check_energy_conservation,
    hours_to_steps,
    parse_clock,
    validate_lead_time,
    validate_window,
)


class TestParseClock:
    def test_valid(self):
        assert parse_clock("17:00") == (17, 0)
        assert parse_clock(" 7:45 ") == (7, 45)

    @pytest.mark.parametrize("value", ["17", "24:00", "17:60", "17:10", "ab:cd"])
    def test_invalid(self, value):
        with pytest.raises(ValidationError):
            parse_clock(value)


class TestSteps:
    def test_hours_to_steps(self):
        assert hours_to_steps(1, "h") == 4
        assert hours_to_steps(0.25, "h") == 1
        assert hours_to_steps(23.0, "h") == 92

    def test_not_a_multiple(self):
        with pytest.raises(ValidationError) as excinfo:
            hours_to_steps(0.1, "window_len_h")
        assert excinfo.value.details["field"] == "window_len_h"

    def test_lead_time_outside_range_only_warns(self):
        assert validate_lead_time(0.25)
        assert validate_lead_time(30.0)

    def test_lead_time_range_comes_from_config(self, monkeypatch):
        warnings = []
        monkeypatch.setattr(validators, "log_warning", warnings.append)
        set_config(AppConfig(flex=FlexSettings(min_lead_time_h=2.0, max_lead_time_h=4.0)))
        assert validate_lead_time(3.0)
        assert warnings == []
        assert validate_lead_time(1.0)
        assert validate_lead_time(23.0)
        assert len(warnings) == 2
        assert "[2.0, 4.0]" in warnings[0]

    def test_lead_time_must_be_positive(self):
        with pytest.raises(ValidationError):
            validate_lead_time(0.0)

    def test_window(self):
        assert validate_window(96, 4, 96, 192)
        with pytest.raises(ValidationError):
            validate_window(95, 4, 96, 192)
        with pytest.raises(ValidationError):
            validate_window(190, 4, 96, 192)


class TestEnergyConservation:
    def test_within_tolerance(self):
        power = np.array([[11.0, 0.0], [2.0, 2.0]])
        worst = check_energy_conservation(power, np.array([2.75, 1.0]), 0.25, 1e-6)
        assert worst == pytest.approx(0.0)

    def test_violation(self):
        with pytest.raises(ValidationError):
            check_energy_conservation(np.array([[11.0, 0.0]]), np.array([3.0]), 0.25, 1e-6)

    def test_empty(self):
        assert check_energy_conservation(np.zeros((0, 4)), np.zeros(0), 0.25, 1e-6) == 0.0


class TestErrors:
    def test_to_dict(self):
        error = ConfigError("bad", details={"field": "x"})
        assert error.to_dict() == {"error_code": "CONFIG_ERROR", "message": "bad", "details": {"field": "x"}}

    def test_default_code(self):
        assert FlexcastError("oops").error_code == "UNKNOWN_ERROR"
