"""Unit tests for the intensity search, the feasibility thresholds and parameter sweeps."""

import math
import warnings
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from link_budget.budget_engine import compute_ledger
from link_budget.errors import DomainError, LinkAdvisory
from link_budget.parameters import ChannelModel, EveCapability, EveClass
from optimizer.feasibility import (
    ALPHA_ABS_TOL,
    MuPolicy,
    bisect_threshold,
    max_attenuation,
    min_block_length,
)
from optimizer.intensity_search import capacity_or_floor, golden_section_max, optimize_mu
from optimizer.sweep_runner import (
    ERROR_COLUMN,
    OPTIMIZED_MU_COLUMN,
    SweepSpec,
    SweepTable,
    apply_parameter,
    sweep,
)


@pytest.fixture
def lossless_link(golden_link):
    """Golden link with y = eta, so S is monotone in alpha."""
    return replace(golden_link, eve=EveCapability(EveClass.LOSSLESS_REPLACEMENT))


# =============================================================================
# Scalar search helpers
# =============================================================================


class TestSearchHelpers:

    def test_golden_section_finds_parabola_peak(self):
        x, fx, evaluations = golden_section_max(lambda v: -(v - 0.3) ** 2, 0.1, 1.0)
        assert x == pytest.approx(0.3, rel=1e-7)
        assert fx == pytest.approx(0.0, abs=1e-14)
        assert evaluations > 2

    def test_bisect_threshold_brackets_step(self):
        lo, hi, evaluations = bisect_threshold(lambda v: v > 0.123456, 0.0, 1.0, 1e-9)
        assert lo <= 0.123456 < hi
        assert hi - lo <= 1e-9
        assert evaluations == math.ceil(math.log2(1e9))


# =============================================================================
# Intensity search
# =============================================================================


class TestOptimizeMu:

    def test_matches_brute_force_grid(self, golden_link, golden_security):
        result = optimize_mu(golden_link, golden_security)
        grid = np.geomspace(1e-4, 10.0, 10000)
        values = np.array([capacity_or_floor(golden_link.with_mu(float(mu)), golden_security) for mu in grid])
        step = math.log(grid[1] / grid[0])
        best = int(np.argmax(values))
        assert result.feasible
        assert result.value >= values[best] - 1e-12
        assert abs(math.log(result.argmax / grid[best])) <= 2 * step
        assert not result.boundary

    def test_beats_random_points(self, golden_link, golden_security):
        result = optimize_mu(golden_link, golden_security)
        rng = np.random.default_rng(11)
        for mu in np.exp(rng.uniform(math.log(1e-4), math.log(10.0), 200)):
            assert result.value >= capacity_or_floor(golden_link.with_mu(float(mu)), golden_security)

    def test_reported_value_is_reproducible(self, golden_link, golden_security):
        result = optimize_mu(golden_link, golden_security)
        again = compute_ledger(golden_link.with_mu(result.argmax), golden_security)
        assert again.capacity == pytest.approx(result.value, abs=1e-12)
        assert result.ledger_at_optimum.capacity == result.value

    def test_infeasible_link(self, golden_link, golden_security):
        result = optimize_mu(golden_link.with_alpha(1e-9), golden_security)
        assert not result.feasible
        assert result.value <= 0

    def test_boundary_flag(self, golden_link, golden_security):
        result = optimize_mu(golden_link, golden_security, mu_bounds=(0.05, 0.08))
        assert result.argmax == 0.08
        assert result.boundary

    @pytest.mark.parametrize("bounds, points", [((0.0, 1.0), 96), ((1.0, 0.5), 96), ((1e-4, 10.0), 10)])
    def test_invalid_settings(self, golden_link, golden_security, bounds, points):
        with pytest.raises(DomainError):
            optimize_mu(golden_link, golden_security, mu_bounds=bounds, grid_points=points)


# =============================================================================
# Feasibility thresholds
# =============================================================================


class TestMaxAttenuation:

    def test_monotone_mode_witness(self, lossless_link, golden_security):
        result = max_attenuation(lossless_link, golden_security)
        lo, hi = result.witness
        assert result.feasible
        assert result.argmax == hi
        assert hi - lo <= ALPHA_ABS_TOL
        assert capacity_or_floor(lossless_link.with_alpha(lo), golden_security) <= 0
        assert capacity_or_floor(lossless_link.with_alpha(hi), golden_security) > 0
        assert capacity_or_floor(lossless_link.with_alpha(hi + 1e-9), golden_security) > 0

    def test_alpha_dependent_y_witness(self, golden_link, golden_security):
        result = max_attenuation(golden_link, golden_security)
        lo, hi = result.witness
        assert result.feasible
        assert capacity_or_floor(golden_link.with_alpha(lo), golden_security) <= 0
        assert capacity_or_floor(golden_link.with_alpha(hi), golden_security) > 0

    def test_optimized_mu_tolerates_more_loss(self, lossless_link, golden_security):
        fixed = max_attenuation(lossless_link, golden_security, MuPolicy.FIXED)
        optimized = max_attenuation(lossless_link, golden_security, MuPolicy.OPTIMIZED)
        assert optimized.feasible
        assert optimized.argmax <= fixed.argmax + 1e-6

    def test_infeasible_even_without_loss(self, lossless_link, golden_security):
        noisy = replace(lossless_link, channel=ChannelModel(alpha=0.1, r_c=0.2))
        result = max_attenuation(noisy, golden_security)
        assert not result.feasible
        assert result.boundary
        assert result.argmax == 1.0


class TestMinBlockLength:

    def test_witness_bracket(self, golden_link, golden_security):
        result = min_block_length(golden_link, golden_security)
        m_min = result.argmax
        assert result.feasible
        assert result.witness == (m_min - 1, m_min)
        assert capacity_or_floor(golden_link, golden_security.with_m(m_min)) > 0
        assert capacity_or_floor(golden_link, golden_security.with_m(m_min - 1)) <= 0
        assert capacity_or_floor(golden_link, golden_security.with_m(m_min / 2)) <= 0

    def test_golden_block_is_long_enough(self, golden_link, golden_security):
        assert min_block_length(golden_link, golden_security).argmax < golden_security.m

    def test_larger_pa_budget_needs_longer_blocks(self, golden_link, golden_security):
        base = min_block_length(golden_link, golden_security).argmax
        heavier = min_block_length(golden_link, replace(golden_security, g_pa=60)).argmax
        assert heavier >= base

    def test_infeasible_at_any_length(self, golden_link, golden_security):
        noisy = replace(golden_link, channel=ChannelModel(alpha=0.1, r_c=0.2))
        result = min_block_length(noisy, golden_security)
        assert not result.feasible
        assert result.argmax == math.inf


# =============================================================================
# Parameter sweeps
# =============================================================================


class TestSweepSpec:

    def test_unknown_axis(self):
        with pytest.raises(DomainError):
            SweepSpec(axis="channel.length", grid=(1.0,))

    def test_empty_grid(self):
        with pytest.raises(DomainError):
            SweepSpec(axis="channel.alpha", grid=())

    def test_non_monotone_grid(self):
        with pytest.raises(DomainError):
            SweepSpec(axis="channel.alpha", grid=(0.1, 0.3, 0.2))

    def test_descending_grid_allowed(self):
        assert SweepSpec(axis="channel.alpha", grid=(0.3, 0.2, 0.1)).grid == (0.3, 0.2, 0.1)

    def test_mu_axis_cannot_optimize_mu(self):
        with pytest.raises(DomainError):
            SweepSpec(axis="source.mu", grid=(0.1, 0.2), optimize_mu_per_point=True)

    def test_apply_parameter_security_axis(self, golden_link, golden_security):
        link, sec = apply_parameter(golden_link, golden_security, "security.m", 1e9)
        assert link is golden_link
        assert sec.m == 1e9


class TestSweep:

    def test_single_point_matches_ledger(self, golden_link, golden_security):
        table = sweep(golden_link, golden_security, SweepSpec("channel.alpha", (0.1,)), progress=False)
        row = table.records()[0]
        ledger = compute_ledger(golden_link, golden_security)
        assert len(table) == 1
        assert row["S"] == ledger.capacity
        assert row["L"] == ledger.key_length
        assert row["regime"] == "direct"
        assert row[ERROR_COLUMN] == ""

    def test_mu_sweep_peak_matches_optimizer(self, golden_link, golden_security):
        grid = tuple(np.geomspace(1e-4, 10.0, 200))
        table = sweep(golden_link, golden_security, SweepSpec("source.mu", grid), progress=False)
        result = optimize_mu(golden_link, golden_security)
        assert result.value >= table.best_row()["S"] - 1e-12
        assert table.best_row()["S"] == pytest.approx(result.value, rel=1e-2)

    def test_alpha_sweep_with_optimized_mu_is_monotone(self, lossless_link, golden_security):
        grid = tuple(np.geomspace(0.01, 1.0, 12))
        spec = SweepSpec("channel.alpha", grid, optimize_mu_per_point=True)
        table = sweep(lossless_link, golden_security, spec, progress=False)
        capacity = table.frame["S"].to_numpy()
        assert np.all(np.diff(capacity) >= 0)
        assert table.columns[:2] == ["channel.alpha", "source.mu"]

    def test_worker_count_does_not_change_results(self, golden_link, golden_security):
        spec = SweepSpec("channel.r_c", tuple(np.linspace(0.0, 0.05, 9)))
        single = sweep(golden_link, golden_security, spec, workers=1, progress=False)
        pooled = sweep(golden_link, golden_security, spec, workers=4, progress=False)
        pd.testing.assert_frame_equal(single.frame, pooled.frame)

    def test_invalid_point_becomes_error_row(self, golden_link, golden_security):
        table = sweep(golden_link, golden_security, SweepSpec("channel.alpha", (0.5, 2.0)), progress=False)
        good, bad = table.records()
        assert good[ERROR_COLUMN] == ""
        assert "channel.alpha" in bad[ERROR_COLUMN]
        assert math.isnan(bad["S"])
        assert not bad["feasible"]

    def test_csv_round_trip(self, golden_link, golden_security, tmp_path):
        spec = SweepSpec("channel.alpha", tuple(np.geomspace(0.01, 1.0, 7)))
        table = sweep(golden_link, golden_security, spec, progress=False)
        path = table.to_csv(tmp_path / "sweep.csv")
        text = path.read_bytes()
        assert b"\r\n" not in text
        assert text.splitlines()[0].decode().startswith("channel.alpha,n,e_T")

        loaded = SweepTable.from_csv(path)
        assert loaded.axis == "channel.alpha"
        assert loaded.columns == table.columns
        assert np.array_equal(loaded.frame["S"].to_numpy(), table.frame["S"].to_numpy())
        assert np.array_equal(loaded.frame["channel.alpha"].to_numpy(), table.frame["channel.alpha"].to_numpy())
        assert list(loaded.frame["regime"]) == list(table.frame["regime"])

    def test_pooled_optimized_sweep_leaves_warning_filters_alone(self, lossless_link, golden_security):
        before = list(warnings.filters)
        spec = SweepSpec("channel.alpha", tuple(np.geomspace(0.001, 1.0, 160)), optimize_mu_per_point=True)
        sweep(lossless_link, golden_security, spec, workers=16, progress=False)
        assert warnings.filters == before

    def test_advisories_still_surface_after_pooled_sweep(self, golden_link, golden_security):
        spec = SweepSpec("channel.r_c", tuple(np.linspace(0.0, 0.3, 40)))
        sweep(golden_link, golden_security, spec, workers=16, progress=False)
        noisy = replace(golden_link, channel=ChannelModel(alpha=0.1, r_c=0.3))
        with pytest.warns(LinkAdvisory, match="sifted error rate"):
            compute_ledger(noisy, golden_security)

    def test_csv_round_trip_with_optimized_mu_and_error_row(self, golden_link, golden_security, tmp_path):
        spec = SweepSpec("security.g_auth", (1.0, 30.0), optimize_mu_per_point=True)
        table = sweep(golden_link, golden_security, spec, progress=False)
        assert table.records()[0][ERROR_COLUMN] != ""

        loaded = SweepTable.from_csv(table.to_csv(tmp_path / "sweep.csv"))
        assert loaded.frame[OPTIMIZED_MU_COLUMN].dtype == np.float64
        assert math.isnan(loaded.frame[OPTIMIZED_MU_COLUMN].iloc[0])
        pd.testing.assert_frame_equal(loaded.frame, table.frame, check_exact=True)
