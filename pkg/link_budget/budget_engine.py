#!/usr/bin/env python3
"""
Budget Engine

Computes every term of the key-length ledger of a weak-coherent-pulse BB84 link

    L = n - (e_T + q + t + nu) - (a + g_pa),   S = L / m,   R = S / tau

together with the small-dark-count form of S, the attack-regime label and the
finite-block penalties. All quantities are real-valued expectations in bits;
rounding to whole bits is left to callers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Dict, Tuple

from link_budget.errors import DomainError, LinkAdvisory
from link_budget.parameters import (
    AttackRegime,
    ChannelModel,
    DetectorModel,
    LinkParameters,
    RegimeLabel,
    SecurityParameters,
    SourceModel,
    regime_classify,
)
from link_budget.photon_stats import (
    attack_margin_xi,
    binary_entropy,
    cosh_remainder,
    exp_remainder,
    poisson_pmf,
    poisson_tail,
    renyi_info_max,
    sinh_remainder,
)

# Adaptive-regime series stops once psi_{>=2k}(mu) drops below this
ADAPTIVE_TAIL_TOL = 1e-15
ADAPTIVE_MAX_K = 200
# Sifted error rate above which the error-correction and attack bounds are flagged
HIGH_ERROR_RATE = 0.25

_SQRT2 = math.sqrt(2.0)


# ------------- Sifting and error statistics -------------

def sifted_length(m: float, source: SourceModel, channel: ChannelModel, detector: DetectorModel) -> float:
    """n = (m/2) [psi_{>=1}(eta mu alpha)(1 - r_d) + r_d]"""
    psi1 = poisson_tail(detector.eta * source.mu * channel.alpha, 1)
    return 0.5 * m * (psi1 * (1.0 - detector.r_d) + detector.r_d)


def error_count(m: float, source: SourceModel, channel: ChannelModel, detector: DetectorModel) -> float:
    """e_T = (m/2) [psi_{>=1}(eta mu alpha) r_c (1 - r_d) + r_d / 2]"""
    psi1 = poisson_tail(detector.eta * source.mu * channel.alpha, 1)
    return 0.5 * m * (psi1 * channel.r_c * (1.0 - detector.r_d) + 0.5 * detector.r_d)


def single_photon_counts(m: float, source: SourceModel, channel: ChannelModel,
                         detector: DetectorModel) -> Tuple[float, float]:
    """
    Contributions to n and e_T from pulses where exactly one photon reaches Bob.

    Returns:
        tuple: (n1, e_T1)
    """
    psi_one = poisson_pmf(detector.eta * source.mu * channel.alpha, 1)
    r_d = detector.r_d
    n1 = 0.5 * m * (psi_one * (1.0 - r_d) + r_d)
    e_t1 = 0.5 * m * (channel.r_c * psi_one * (1.0 - r_d) + 0.5 * r_d)
    return n1, e_t1


# ------------- Leakage terms -------------

def ec_leakage(n: float, e_t: float, x: float) -> float:
    """
    Bits revealed by error correction, q = x n h(e_T / n).

    With x = 1 this is the Shannon minimum q_min.
    """
    if e_t < 0 or n < 0:
        raise DomainError(f"ec_leakage needs n >= 0 and e_T >= 0 (got n={n}, e_T={e_t})")
    if e_t > n:
        raise DomainError(f"ec_leakage needs e_T <= n (got n={n}, e_T={e_t})")
    if x < 1:
        raise DomainError(f"ec_leakage needs x >= 1 (got {x})")
    if n == 0 or e_t == 0:
        return 0.0
    return x * n * binary_entropy(e_t / n)


def _attack_bound(n1: float, e_t1: float, xi: float) -> float:
    # t = T e_T with the e_T factor cancelled, so e_T = 0 is regular
    error_rate = e_t1 / n1
    return ((n1 - e_t1) * renyi_info_max(error_rate + xi)
            + xi * n1 * math.sqrt(1.0 - error_rate))


def single_photon_attack_bound(n1: float, e_t1: float, epsilon: float) -> float:
    """
    Upper bound t on the information Eve gains by measuring single-photon pulses.

    Args:
        n1: Expected single-photon sifted bits
        e_t1: Expected errors among them
        epsilon: Probability that an attack on a single photon succeeds

    Returns:
        float: t in bits (0 with a LinkAdvisory when n1 = 0)
    """
    if n1 < 0 or e_t1 < 0 or e_t1 > n1:
        raise DomainError(f"single_photon_attack_bound needs 0 <= e_T1 <= n1 (got n1={n1}, e_T1={e_t1})")
    if n1 == 0:
        warnings.warn("no single-photon signal: t set to 0", LinkAdvisory, stacklevel=2)
        return 0.0
    return _attack_bound(n1, e_t1, attack_margin_xi(n1, epsilon))


def eve_strength_sigma(k: int, y: float) -> float:
    """
    sigma_e(k, y) = (1 - (1-y)^{2k-1}) / (1 - 2^{1-k})

    Greater than one exactly when the indirect attack beats the direct attack
    on a pulse of 2k photons.
    """
    if k < 2:
        raise DomainError(f"eve_strength_sigma needs k >= 2 (got {k})")
    if not 0 < y <= 1:
        raise DomainError(f"eve_strength_sigma needs 0 < y <= 1 (got {y})")
    return (1.0 - (1.0 - y) ** (2 * k - 1)) / (1.0 - 2.0 ** (1 - k))


def _indirect_per_pair(mu: float, y: float) -> float:
    s = 1.0 - y
    tail = poisson_tail(mu, 2)
    if s == 0.0:
        return tail
    return tail - math.exp(-mu) * exp_remainder(mu * s, 2) / s


def _direct_per_pair(mu: float, y: float) -> float:
    # 1 - e^{-mu}(sqrt2 sinh(u) + 2 cosh(u) - 1) with u = mu / sqrt2, regrouped
    # into third-order remainders so that small mu keeps full precision
    u = mu / _SQRT2
    higher = exp_remainder(mu, 3) - _SQRT2 * sinh_remainder(u) - 2.0 * cosh_remainder(u)
    return poisson_pmf(mu, 2) * y + math.exp(-mu) * higher


def _adaptive_per_pair(mu: float, y: float) -> float:
    u = mu / _SQRT2
    odd = math.exp(-mu) * (sinh_remainder(mu) - _SQRT2 * sinh_remainder(u))
    total = poisson_pmf(mu, 2) * y + odd
    for k in range(2, ADAPTIVE_MAX_K + 1):
        if poisson_tail(mu, 2 * k) < ADAPTIVE_TAIL_TOL:
            break
        if eve_strength_sigma(k, y) >= 1.0:
            bits = 1.0 - (1.0 - y) ** (2 * k - 1)
        else:
            bits = 1.0 - 2.0 ** (1 - k)
        total += poisson_pmf(mu, 2 * k) * bits
    return total


def nu_per_pulse_pair(mu: float, regime: AttackRegime) -> float:
    """Multi-photon leakage normalized per sifting pair, nu^max / (m/2)."""
    if mu <= 0:
        raise DomainError(f"multiphoton leakage needs mu > 0 (got {mu})")
    if regime.label is RegimeLabel.INDIRECT:
        return _indirect_per_pair(mu, regime.y)
    if regime.label is RegimeLabel.DIRECT:
        return _direct_per_pair(mu, regime.y)
    return _adaptive_per_pair(mu, regime.y)


def multiphoton_leakage(m: float, mu: float, regime: AttackRegime) -> float:
    """
    Maximum information nu^max Eve gains from pulses with two or more photons.

    Args:
        m: Raw block length
        mu: Mean photon number per pulse at the source
        regime: Attack regime from regime_classify

    Returns:
        float: nu^max in bits
    """
    return 0.5 * m * nu_per_pulse_pair(mu, regime)


# ------------- Authentication and privacy amplification -------------

def auth_cost(n: float, m: float, g_auth: float, g_ec: float, g_tilde_ec: float) -> float:
    """
    Secret bits consumed by continuous authentication of the public discussion.

    Args:
        n: Sifted length (>= 2)
        m: Raw block length (>= 2)
        g_auth, g_ec, g_tilde_ec: Authentication security parameters (>= 2)

    Returns:
        float: a(n, m), evaluated with real-valued logarithms
    """
    if n < 2 or m < 2 or min(g_auth, g_ec, g_tilde_ec) < 2:
        raise DomainError(
            "auth_cost needs n, m and every authentication parameter >= 2 "
            f"(got n={n}, m={m}, g_auth={g_auth}, g_ec={g_ec}, g_tilde_ec={g_tilde_ec})"
        )
    log_sift = math.log2(2.0 * n * (1.0 + math.log2(m)))
    log_2n = math.log2(2.0 * n)
    log_n = math.log2(n)
    log_ec = math.log2(g_ec)
    log_tilde = math.log2(g_tilde_ec)
    return (4.0 * (g_auth + math.log2(log_sift)) * log_sift
            + 4.0 * (g_auth + math.log2(log_2n)) * log_2n
            + 4.0 * (g_ec + math.log2(log_n)) * log_n
            + 4.0 * (g_auth + math.log2(log_ec)) * log_ec
            + g_tilde_ec
            + 4.0 * (g_auth + math.log2(log_tilde)) * log_tilde)


def pa_info_bound(g_pa: float) -> float:
    """Bound on Eve's expected information after privacy amplification, 2^{-g_pa} / ln 2."""
    if g_pa < 0:
        raise DomainError(f"pa_info_bound needs g_pa >= 0 (got {g_pa})")
    return 2.0 ** (-g_pa) / math.log(2.0)


def failure_bounds(sec: SecurityParameters) -> Tuple[float, float]:
    """
    Probability bounds bought by the authentication parameters.

    Returns:
        tuple: (spoofing bound 2^{-g_auth}, key-mismatch bound 2^{-g_ec} + 2^{-g_tilde_ec}),
               each capped at 1
    """
    spoof = min(1.0, 2.0 ** (-sec.g_auth))
    mismatch = min(1.0, 2.0 ** (-sec.g_ec) + 2.0 ** (-sec.g_tilde_ec))
    return spoof, mismatch


# ------------- Ledger -------------

@dataclass(frozen=True)
class BudgetLedger:
    """Every expected bit count of the key-length ledger plus the derived capacity figures."""
    m: float
    n: float
    e_t: float
    n1: float
    e_t1: float
    q: float
    q_min: float
    xi: float
    t: float
    nu: float
    a: float
    g_pa: float
    key_length: float
    capacity: float
    rate: float
    regime: AttackRegime
    f: float
    nu_tilde: float
    capacity_approx: float
    multiphoton_fraction: float
    eve_info_after_pa: float
    auth_spoof_bound: float
    key_mismatch_bound: float
    feasible: bool
    advisories: Tuple[str, ...] = ()

    def summary_row(self) -> Dict[str, object]:
        """Columns used by sweep tables and CSV output."""
        return {
            "n": self.n,
            "e_T": self.e_t,
            "q": self.q,
            "t": self.t,
            "nu": self.nu,
            "a": self.a,
            "L": self.key_length,
            "S": self.capacity,
            "R": self.rate,
            "regime": self.regime.label.value,
            "feasible": self.feasible,
        }

    def to_dict(self) -> Dict[str, object]:
        """All fields as plain JSON-compatible values."""
        data = asdict(self)
        data["regime"] = self.regime.label.value
        data["y"] = self.regime.y
        data["advisories"] = list(self.advisories)
        return data


def _small_dark_count_capacity(psi1: float, r_c: float, r_d: float, m: float, e_t: float,
                               q: float, t: float, f: float, nu_tilde: float, overhead: float) -> float:
    if e_t > 0:
        return 0.5 * (psi1 * (1.0 - f * r_c) + (1.0 - 0.5 * f) * r_d - nu_tilde) - overhead / m
    # e_T = 0 forces r_d = 0 and psi1 r_c = 0; the f-terms reduce to 2(q + t)/m
    return 0.5 * (psi1 - 2.0 * (q + t) / m - nu_tilde) - overhead / m


def compose_ledger(link: LinkParameters, sec: SecurityParameters) -> BudgetLedger:
    """
    Compose every ledger term for one link and block length.

    A ledger with L <= 0 is returned with feasible=False; it is not an error.
    Advisories are only recorded on the ledger; no warning is issued and the
    process-wide warning filters are never touched.

    Args:
        link: Source, channel, detector, error-correction and Eve parameters
        sec: Block length and security parameters

    Returns:
        BudgetLedger: The populated ledger
    """
    m = sec.m
    source, channel, detector = link.source, link.channel, link.detector
    advisories = []

    n = sifted_length(m, source, channel, detector)
    e_t = error_count(m, source, channel, detector)
    n1, e_t1 = single_photon_counts(m, source, channel, detector)

    q = ec_leakage(n, e_t, link.error_correction.x)
    q_min = ec_leakage(n, e_t, 1.0)

    if n1 > 0:
        xi = attack_margin_xi(n1, sec.epsilon)
        t = _attack_bound(n1, e_t1, xi)
    else:
        xi = 0.0
        t = 0.0
        advisories.append("no single-photon signal: t set to 0")

    regime = regime_classify(link.eve, detector, channel)
    nu = multiphoton_leakage(m, source.mu, regime)
    a = auth_cost(n, m, sec.g_auth, sec.g_ec, sec.g_tilde_ec) if sec.authenticated else 0.0

    key_length = n - (e_t + q + t + nu) - (a + sec.g_pa)
    capacity = key_length / m
    rate = capacity / source.tau

    f = 1.0 + (q + t) / e_t if e_t > 0 else math.inf
    nu_tilde = 2.0 * nu / m
    psi1 = poisson_tail(link.detected_mean, 1)
    capacity_approx = _small_dark_count_capacity(
        psi1, channel.r_c, detector.r_d, m, e_t, q, t, f, nu_tilde, sec.g_pa + a
    )

    multiphoton_mass = 0.5 * m * poisson_tail(source.mu, 2)
    multiphoton_fraction = nu / multiphoton_mass if multiphoton_mass > 0 else 0.0

    if n > 0 and e_t / n > HIGH_ERROR_RATE:
        advisories.append(
            f"sifted error rate {e_t / n:.4f} exceeds {HIGH_ERROR_RATE}; error-correction and attack bounds may not apply"
        )

    spoof, mismatch = failure_bounds(sec)
    return BudgetLedger(
        m=m, n=n, e_t=e_t, n1=n1, e_t1=e_t1, q=q, q_min=q_min, xi=xi, t=t, nu=nu, a=a,
        g_pa=sec.g_pa, key_length=key_length, capacity=capacity, rate=rate, regime=regime,
        f=f, nu_tilde=nu_tilde, capacity_approx=capacity_approx,
        multiphoton_fraction=multiphoton_fraction,
        eve_info_after_pa=pa_info_bound(sec.g_pa),
        auth_spoof_bound=spoof, key_mismatch_bound=mismatch,
        feasible=key_length > 0, advisories=tuple(advisories),
    )


def compute_ledger(link: LinkParameters, sec: SecurityParameters) -> BudgetLedger:
    """
    compose_ledger, then issue each advisory as a LinkAdvisory warning.

    Args:
        link: Source, channel, detector, error-correction and Eve parameters
        sec: Block length and security parameters

    Returns:
        BudgetLedger: The populated ledger
    """
    ledger = compose_ledger(link, sec)
    for message in ledger.advisories:
        warnings.warn(message, LinkAdvisory, stacklevel=2)
    return ledger


# ------------- Finite-block analysis -------------

@dataclass(frozen=True)
class FiniteBlockPenalties:
    """The m-dependent contributions to S, per raw bit."""
    overhead_per_bit: float
    xi_penalty_per_bit: float


def asymptotic_capacity(link: LinkParameters, sec: SecurityParameters) -> float:
    """
    Secrecy capacity in the limit m -> infinity: (a + g_pa)/m vanishes and xi -> 0.

    Every remaining term is proportional to m, so the block length of sec only
    sets the scale.
    """
    m = sec.m
    source, channel, detector = link.source, link.channel, link.detector
    n = sifted_length(m, source, channel, detector)
    e_t = error_count(m, source, channel, detector)
    n1, e_t1 = single_photon_counts(m, source, channel, detector)
    q = ec_leakage(n, e_t, link.error_correction.x)
    t_limit = _attack_bound(n1, e_t1, 0.0) if n1 > 0 else 0.0
    nu = multiphoton_leakage(m, source.mu, regime_classify(link.eve, detector, channel))
    return (n - e_t - q - t_limit - nu) / m


def finite_block_penalties(link: LinkParameters, sec: SecurityParameters) -> FiniteBlockPenalties:
    """Split the finite-block loss of S into the authentication/PA overhead and the xi-driven part of t."""
    ledger = compose_ledger(link, sec)
    t_limit = _attack_bound(ledger.n1, ledger.e_t1, 0.0) if ledger.n1 > 0 else 0.0
    return FiniteBlockPenalties(
        overhead_per_bit=(ledger.a + ledger.g_pa) / sec.m,
        xi_penalty_per_bit=(ledger.t - t_limit) / sec.m,
    )


__all__ = [
    "sifted_length", "error_count", "single_photon_counts", "ec_leakage",
    "single_photon_attack_bound", "regime_classify", "eve_strength_sigma",
    "nu_per_pulse_pair", "multiphoton_leakage", "auth_cost", "pa_info_bound",
    "failure_bounds", "BudgetLedger", "compose_ledger", "compute_ledger",
    "FiniteBlockPenalties", "asymptotic_capacity", "finite_block_penalties",
]
