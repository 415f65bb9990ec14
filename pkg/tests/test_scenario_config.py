"""Unit tests for scenario loading, overrides and config error reporting."""

import os

import pytest

from link_budget.parameters import EveClass, Medium
from optimizer.feasibility import MuPolicy
from scenario_config.config_loader import (
    OVERRIDE_ORIGIN,
    THREADS_ENV,
    ConfigError,
    build_scenario,
    bundled_scenarios,
    load_scenario,
    parse_overrides,
    resolve_worker_count,
)

MINIMAL = {
    "source.mu": 0.1,
    "channel.alpha": 0.1,
    "detector.eta": 0.5,
    "security.m": 1e6,
}


# =============================================================================
# Loading
# =============================================================================


class TestLoadScenario:

    def test_golden_scenario(self, golden_scenario_path, golden_link, golden_security):
        scenario = load_scenario(golden_scenario_path)
        assert scenario.link == golden_link
        assert scenario.security == golden_security
        assert scenario.optimizer.mu_bounds == (1e-4, 10.0)
        assert scenario.optimizer.alpha_policy is MuPolicy.FIXED
        assert scenario.validate.m == 1_000_000
        assert scenario.validate.seed == 20240601

    def test_golden_sweep_section(self, golden_scenario_path):
        spec = load_scenario(golden_scenario_path).sweep
        assert spec.axis == "channel.alpha"
        assert len(spec.grid) == 25
        assert spec.grid[0] == pytest.approx(0.01, rel=1e-12)
        assert spec.grid[-1] == pytest.approx(1.0, rel=1e-12)
        assert spec.optimize_mu_per_point

    def test_every_bundled_scenario_loads(self):
        paths = bundled_scenarios()
        assert {p.name for p in paths} >= {"golden.json", "lossless_fiber.json"}
        for path in paths:
            assert load_scenario(path).security.m > 0

    def test_defaults_fill_optional_keys(self, write_scenario):
        scenario = load_scenario(write_scenario(MINIMAL))
        assert scenario.link.source.tau == 1e-9
        assert scenario.link.channel.r_c == 0.0
        assert scenario.link.channel.medium is Medium.FIBER
        assert scenario.link.eve.eve_class is EveClass.LOSSLESS_REPLACEMENT
        assert scenario.link.error_correction.x == 1.0
        assert not scenario.security.authenticated
        assert scenario.sweep is None

    def test_file_is_not_modified(self, write_scenario):
        path = write_scenario(MINIMAL)
        before = path.read_bytes()
        load_scenario(path, {"channel.alpha": 0.2})
        assert path.read_bytes() == before

    def test_overrides_win(self, write_scenario):
        scenario = load_scenario(write_scenario(MINIMAL), {"channel.alpha": 0.05, "eve.y_override": 0.3})
        assert scenario.link.channel.alpha == 0.05
        assert scenario.link.y == 0.3

    def test_technology_limited_y(self, write_scenario):
        scenario = load_scenario(write_scenario({**MINIMAL, "eve.capability": "technology_limited"}))
        assert scenario.link.y == pytest.approx(0.05, rel=1e-15)

    def test_sweep_from_explicit_grid(self, write_scenario):
        values = {**MINIMAL, "sweep.axis": "detector.r_d", "sweep.grid": [0, 1e-6, 1e-5]}
        assert load_scenario(write_scenario(values)).sweep.grid == (0.0, 1e-6, 1e-5)

    def test_sweep_linear_range(self, write_scenario):
        values = {**MINIMAL, "sweep.axis": "channel.r_c", "sweep.start": 0.0, "sweep.stop": 0.1, "sweep.points": 11}
        grid = load_scenario(write_scenario(values)).sweep.grid
        assert len(grid) == 11
        assert grid[5] == pytest.approx(0.05, rel=1e-12)


# =============================================================================
# Errors
# =============================================================================


class TestConfigErrors:

    def test_unknown_key_names_line(self, write_scenario):
        path = write_scenario({**MINIMAL, "channel.length_km": 50})
        with pytest.raises(ConfigError) as excinfo:
            load_scenario(path)
        assert excinfo.value.line == 6
        assert f"{path}:6:" in str(excinfo.value)
        assert "channel.length_km" in str(excinfo.value)

    def test_invariant_violation_names_key_and_line(self, write_scenario):
        path = write_scenario({**MINIMAL, "channel.alpha": 0})
        with pytest.raises(ConfigError) as excinfo:
            load_scenario(path)
        assert excinfo.value.line == 3
        assert "channel.alpha" in str(excinfo.value)

    def test_override_violation_names_override(self, write_scenario):
        with pytest.raises(ConfigError) as excinfo:
            load_scenario(write_scenario(MINIMAL), {"detector.eta": 1.5})
        assert excinfo.value.origin == OVERRIDE_ORIGIN
        assert "detector.eta" in str(excinfo.value)

    def test_missing_required_key(self, write_scenario):
        values = dict(MINIMAL)
        del values["security.m"]
        with pytest.raises(ConfigError, match="security.m"):
            load_scenario(write_scenario(values))

    def test_non_numeric_value(self, write_scenario):
        with pytest.raises(ConfigError, match="source.mu"):
            load_scenario(write_scenario({**MINIMAL, "source.mu": "bright"}))

    def test_boolean_is_not_a_number(self, write_scenario):
        with pytest.raises(ConfigError, match="security.m"):
            load_scenario(write_scenario({**MINIMAL, "security.m": True}))

    def test_invalid_json_reports_line(self, write_scenario):
        path = write_scenario('{\n    "source.mu": 0.1,\n    "channel.alpha": \n}\n')
        with pytest.raises(ConfigError) as excinfo:
            load_scenario(path)
        assert excinfo.value.line == 4

    def test_not_an_object(self, write_scenario):
        with pytest.raises(ConfigError):
            load_scenario(write_scenario("[1, 2, 3]"))

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_scenario(tmp_path / "absent.json")

    def test_half_configured_authentication(self, write_scenario):
        with pytest.raises(ConfigError, match="security.g_ec"):
            load_scenario(write_scenario({**MINIMAL, "security.g_auth": 30}))

    @pytest.mark.parametrize("changes, key", [
        ({"optimizer.mu_lo": 1.0, "optimizer.mu_hi": 0.5}, "optimizer.mu_lo"),
        ({"optimizer.grid_points": 10}, "optimizer.grid_points"),
        ({"optimizer.alpha_policy": "sometimes"}, "optimizer.alpha_policy"),
        ({"validate.m": 2e8}, "validate.m"),
        ({"validate.seed": -1}, "validate.seed"),
        ({"channel.medium": "vacuum"}, "channel.medium"),
        ({"eve.capability": "omniscient"}, "eve.capability"),
    ])
    def test_section_validation(self, write_scenario, changes, key):
        with pytest.raises(ConfigError, match=key):
            load_scenario(write_scenario({**MINIMAL, **changes}))

    @pytest.mark.parametrize("changes, key", [
        ({"sweep.axis": "channel.alpha"}, "sweep.axis"),
        ({"sweep.axis": "channel.alpha", "sweep.grid": [0.3, 0.1, 0.2]}, "sweep"),
        ({"sweep.axis": "channel.alpha", "sweep.start": 0.0, "sweep.stop": 1.0, "sweep.points": 5,
          "sweep.spacing": "log"}, "sweep.spacing"),
        ({"sweep.axis": "channel.alpha", "sweep.grid": [0.1], "sweep.optimize_mu": "yes"}, "sweep.optimize_mu"),
        ({"sweep.axis": "channel.colour", "sweep.grid": [0.1]}, "sweep.axis"),
    ])
    def test_sweep_validation(self, write_scenario, changes, key):
        with pytest.raises(ConfigError, match=key):
            load_scenario(write_scenario({**MINIMAL, **changes}))

    def test_build_scenario_without_file(self):
        scenario = build_scenario(dict(MINIMAL), origin="inline")
        assert scenario.origin == "inline"
        assert scenario.values["detector.r_d"] == 0.0


# =============================================================================
# Overrides and environment
# =============================================================================


class TestParseOverrides:

    def test_value_types(self):
        overrides = parse_overrides(["--channel.alpha=0.05", "--sweep.optimize_mu", "true",
                                     "--eve.capability=technology_limited", "--sweep.grid=[0.1, 0.2]"])
        assert overrides == {
            "channel.alpha": 0.05,
            "sweep.optimize_mu": True,
            "eve.capability": "technology_limited",
            "sweep.grid": [0.1, 0.2],
        }

    def test_scientific_notation(self):
        assert parse_overrides(["--security.m=1e8"]) == {"security.m": 1e8}

    def test_stray_argument(self):
        with pytest.raises(ConfigError):
            parse_overrides(["stray"])

    def test_missing_value(self):
        with pytest.raises(ConfigError):
            parse_overrides(["--channel.alpha"])


class TestWorkerCount:

    def test_defaults_to_cpu_count(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV, raising=False)
        assert resolve_worker_count() == (os.cpu_count() or 1)

    def test_capped_by_environment(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "1")
        assert resolve_worker_count() == 1

    @pytest.mark.parametrize("raw", ["0", "-3", "many"])
    def test_invalid_environment(self, monkeypatch, raw):
        monkeypatch.setenv(THREADS_ENV, raw)
        with pytest.raises(ConfigError, match=THREADS_ENV):
            resolve_worker_count()
