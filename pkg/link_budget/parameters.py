#!/usr/bin/env python3
"""
Link and Security Parameters

Immutable parameter bundles describing a weak-coherent-pulse BB84 link:
1. Source, channel, detector and error-correction models
2. Eve's capability class and the derived y parameter
3. Security parameters (block length, epsilon, privacy-amplification and
   authentication budgets)
4. Attack-regime classification thresholds

Every bundle validates its invariants on construction and raises DomainError
naming the violated invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from link_budget.errors import DomainError

# Above Y_HIGH the indirect attack wins for every photon number,
# below Y_LOW the direct attack does.
Y_HIGH = 1.0 - 1.0 / math.sqrt(2.0)
Y_LOW = 1.0 - 2.0 ** (-1.0 / 3.0)


class Medium(str, Enum):
    FIBER = "fiber"
    FREE_SPACE = "free_space"


class EveClass(str, Enum):
    LOSSLESS_REPLACEMENT = "lossless_replacement"
    ENTANGLEMENT_ASSISTED = "entanglement_assisted"
    TECHNOLOGY_LIMITED = "technology_limited"


class RegimeLabel(str, Enum):
    INDIRECT = "indirect"
    DIRECT = "direct"
    ADAPTIVE = "adaptive"


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise DomainError(message)


@dataclass(frozen=True)
class SourceModel:
    """Attenuated laser: Poisson mean photon number mu and pulse period tau (seconds)."""
    mu: float
    tau: float = 1e-9

    def __post_init__(self):
        _require(self.mu > 0, f"source.mu must satisfy mu > 0 (got {self.mu})")
        _require(self.tau > 0, f"source.tau must satisfy tau > 0 (got {self.tau})")


@dataclass(frozen=True)
class ChannelModel:
    """Quantum channel: transmission probability alpha and intrinsic error r_c."""
    alpha: float
    r_c: float = 0.0
    medium: Medium = Medium.FIBER

    def __post_init__(self):
        _require(0 < self.alpha <= 1, f"channel.alpha must satisfy 0 < alpha <= 1 (got {self.alpha})")
        _require(0 <= self.r_c <= 0.5, f"channel.r_c must satisfy 0 <= r_c <= 1/2 (got {self.r_c})")
        object.__setattr__(self, "medium", Medium(self.medium))


@dataclass(frozen=True)
class DetectorModel:
    """Bob's detector: efficiency eta and dark-count probability per pulse period r_d."""
    eta: float
    r_d: float = 0.0

    def __post_init__(self):
        _require(0 < self.eta <= 1, f"detector.eta must satisfy 0 < eta <= 1 (got {self.eta})")
        _require(0 <= self.r_d < 1, f"detector.r_d must satisfy 0 <= r_d < 1 (got {self.r_d})")


@dataclass(frozen=True)
class ErrorCorrectionModel:
    """Leakage multiplier x of the error-correction protocol over the Shannon bound."""
    x: float = 1.0

    def __post_init__(self):
        _require(self.x >= 1, f"error_correction.x must satisfy x >= 1 (got {self.x})")


@dataclass(frozen=True)
class EveCapability:
    """
    Technology attributed to Eve.

    Lossless replacement of the channel and entanglement-assisted attacks both
    give y = eta; a technology-limited Eve gets y = eta * alpha.
    y_override, when set, replaces the rule.
    """
    eve_class: EveClass = EveClass.LOSSLESS_REPLACEMENT
    y_override: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "eve_class", EveClass(self.eve_class))
        if self.y_override is not None:
            _require(0 < self.y_override <= 1,
                     f"eve.y_override must satisfy 0 < y <= 1 (got {self.y_override})")

    def derive_y(self, detector: DetectorModel, channel: ChannelModel) -> float:
        if self.y_override is not None:
            return self.y_override
        if self.eve_class is EveClass.TECHNOLOGY_LIMITED:
            return detector.eta * channel.alpha
        return detector.eta

    @property
    def y_depends_on_alpha(self) -> bool:
        return self.y_override is None and self.eve_class is EveClass.TECHNOLOGY_LIMITED


@dataclass(frozen=True)
class LinkParameters:
    """Everything physical about the link plus Eve's capability class."""
    source: SourceModel
    channel: ChannelModel
    detector: DetectorModel
    error_correction: ErrorCorrectionModel = field(default_factory=ErrorCorrectionModel)
    eve: EveCapability = field(default_factory=EveCapability)

    @property
    def detected_mean(self) -> float:
        """Mean number of photons per pulse that reach and fire Bob's detector (eta mu alpha)."""
        return self.detector.eta * self.source.mu * self.channel.alpha

    @property
    def y(self) -> float:
        return self.eve.derive_y(self.detector, self.channel)

    def with_mu(self, mu: float) -> "LinkParameters":
        return replace(self, source=replace(self.source, mu=mu))

    def with_alpha(self, alpha: float) -> "LinkParameters":
        return replace(self, channel=replace(self.channel, alpha=alpha))


@dataclass(frozen=True)
class SecurityParameters:
    """
    Block length m (raw bits) and the security budgets.

    Setting g_auth = g_ec = g_tilde_ec = 0 disables continuous authentication
    (a = 0); otherwise each must be >= 2 so the nested logarithms are defined.
    """
    m: float
    epsilon: float = 1.0
    g_pa: float = 0.0
    g_auth: float = 0.0
    g_ec: float = 0.0
    g_tilde_ec: float = 0.0

    def __post_init__(self):
        _require(self.m >= 2, f"security.m must satisfy m >= 2 (got {self.m})")
        _require(0 < self.epsilon <= 1, f"security.epsilon must satisfy 0 < epsilon <= 1 (got {self.epsilon})")
        for name in ("g_pa", "g_auth", "g_ec", "g_tilde_ec"):
            value = getattr(self, name)
            _require(value >= 0, f"security.{name} must be >= 0 (got {value})")
        if self.authenticated:
            for name in ("g_auth", "g_ec", "g_tilde_ec"):
                value = getattr(self, name)
                _require(value >= 2, f"security.{name} must be >= 2 when authentication is on (got {value})")

    @property
    def authenticated(self) -> bool:
        return not (self.g_auth == 0 and self.g_ec == 0 and self.g_tilde_ec == 0)

    def with_m(self, m: float) -> "SecurityParameters":
        return replace(self, m=m)


@dataclass(frozen=True)
class AttackRegime:
    """Eve's optimal multi-photon strategy for a given y."""
    label: RegimeLabel
    y: float
    y_low: float = Y_LOW
    y_high: float = Y_HIGH

    def __post_init__(self):
        object.__setattr__(self, "label", RegimeLabel(self.label))
        _require(0 < self.y <= 1, f"y must satisfy 0 < y <= 1 (got {self.y})")


def regime_classify(eve: EveCapability, detector: DetectorModel, channel: ChannelModel) -> AttackRegime:
    """
    Classify Eve's optimal multi-photon attack.

    The boundaries y = Y_LOW and y = Y_HIGH belong to the adaptive band.

    Returns:
        AttackRegime: indirect if y > Y_HIGH, direct if y < Y_LOW, adaptive otherwise
    """
    y = eve.derive_y(detector, channel)
    _require(0 < y <= 1, f"derived y must satisfy 0 < y <= 1 (got {y})")
    if y > Y_HIGH:
        label = RegimeLabel.INDIRECT
    elif y < Y_LOW:
        label = RegimeLabel.DIRECT
    else:
        label = RegimeLabel.ADAPTIVE
    return AttackRegime(label=label, y=y)


__all__ = [
    "Y_HIGH", "Y_LOW", "Medium", "EveClass", "RegimeLabel",
    "SourceModel", "ChannelModel", "DetectorModel", "ErrorCorrectionModel",
    "EveCapability", "LinkParameters", "SecurityParameters", "AttackRegime",
    "regime_classify",
]
