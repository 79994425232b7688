"""Tests for the run configuration."""

from __future__ import annotations

import pytest
import voluptuous as vol

from omega_combing.config import RUN_CONFIG_SCHEMA, RunConfig
from omega_combing.const import DEFAULT_CALIBRATION, DEFAULT_P, DEFAULT_RADIUS, DEFAULT_STEP


class TestSchema:
    """Validation of user-supplied settings."""

    def test_defaults(self):
        config = RunConfig.from_mapping({})
        assert config.p == DEFAULT_P
        assert config.calibration == DEFAULT_CALIBRATION
        assert config.radius == DEFAULT_RADIUS
        assert config.step == DEFAULT_STEP

    def test_coercion(self):
        config = RunConfig.from_mapping({"p": "3", "calibration": "2.5", "radius": "2"})
        assert (config.p, config.calibration, config.radius) == (3, 2.5, 2)

    @pytest.mark.parametrize(
        "key, value",
        [
            ("p", 4),
            ("p", 1),
            ("p", "two"),
            ("calibration", 1.0),
            ("calibration", 0.5),
            ("step", 0.0),
            ("radius", -1),
            ("workers", 0),
            ("pair_attempts", 0),
        ],
    )
    def test_invalid(self, key, value):
        with pytest.raises(vol.Invalid) as excinfo:
            RunConfig.from_mapping({key: value})
        assert key in str(excinfo.value)

    def test_unknown_key(self):
        with pytest.raises(vol.Invalid):
            RunConfig.from_mapping({"colour": "blue"})

    def test_schema_fills_defaults(self):
        assert set(RUN_CONFIG_SCHEMA({})) == set(RunConfig().as_dict())

    def test_params(self):
        params = RunConfig.from_mapping({"p": 5, "calibration": 3.0}).params
        assert (params.p, params.calibration) == (5, 3.0)


class TestConfigHash:
    """Stable identifiers for result files."""

    def test_stable(self):
        config = RunConfig.from_mapping({"p": 3, "seed": 7})
        assert config.config_hash() == RunConfig.from_mapping({"seed": 7, "p": 3}).config_hash()
        assert len(config.config_hash()) == 16

    def test_output_location_ignored(self, tmp_path):
        a = RunConfig.from_mapping({"out": str(tmp_path / "a"), "workers": 1})
        b = RunConfig.from_mapping({"out": str(tmp_path / "b"), "workers": 8})
        assert a.config_hash() == b.config_hash()

    @pytest.mark.parametrize("key, value", [("p", 3), ("seed", 1), ("radius", 2), ("step", 0.1)])
    def test_changes_with_settings(self, key, value):
        assert RunConfig.from_mapping({key: value}).config_hash() != RunConfig().config_hash()
