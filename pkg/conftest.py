"""Shared fixtures: the golden scenario and its parameter bundles."""

import json
from pathlib import Path

import pytest

from link_budget.parameters import (
    ChannelModel,
    DetectorModel,
    ErrorCorrectionModel,
    EveCapability,
    EveClass,
    LinkParameters,
    SecurityParameters,
    SourceModel,
)

PROJECT_ROOT = Path(__file__).parent
GOLDEN_SCENARIO = PROJECT_ROOT / "scenario_config" / "scenarios" / "golden.json"


# =============================================================================
# Golden scenario
# =============================================================================


@pytest.fixture
def golden_link() -> LinkParameters:
    """mu=0.1, eta=0.5, alpha=0.1, r_c=0.01, r_d=1e-5, x=1.2, technology-limited Eve."""
    return LinkParameters(
        source=SourceModel(mu=0.1, tau=1e-9),
        channel=ChannelModel(alpha=0.1, r_c=0.01),
        detector=DetectorModel(eta=0.5, r_d=1e-5),
        error_correction=ErrorCorrectionModel(x=1.2),
        eve=EveCapability(eve_class=EveClass.TECHNOLOGY_LIMITED),
    )


@pytest.fixture
def golden_security() -> SecurityParameters:
    """m=1e7, epsilon=0.01, every g=30."""
    return SecurityParameters(m=1e7, epsilon=0.01, g_pa=30, g_auth=30, g_ec=30, g_tilde_ec=30)


@pytest.fixture
def golden_scenario_path() -> Path:
    return GOLDEN_SCENARIO


@pytest.fixture
def write_scenario(tmp_path):
    """Write a scenario dict (or raw text) to a temporary file and return its path."""
    def _write(content, name="scenario.json") -> Path:
        path = tmp_path / name
        if isinstance(content, str):
            path.write_text(content, encoding="utf-8")
        else:
            path.write_text(json.dumps(content, indent=4), encoding="utf-8")
        return path
    return _write


@pytest.fixture
def golden_values() -> dict:
    with open(GOLDEN_SCENARIO, "r", encoding="utf-8") as f:
        return json.load(f)
