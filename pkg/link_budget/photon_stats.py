#!/usr/bin/env python3
"""
Photon Statistics Kernel

Special functions shared by the budget engine and the oracles:
1. Poisson photon-number probabilities and their upper tails
2. Binary entropy
3. Inverse error function (rational start + Halley refinement)
4. Statistical margin xi and the Renyi-information ceiling for single-photon attacks

Every function is a pure function of its arguments.
"""

from __future__ import annotations

import math

from link_budget.errors import DomainError, InfeasibleError

# Above this argument the Taylor remainders are evaluated from the closed form.
SERIES_CUTOFF = 2.0
# Largest ratio between a term and the running sum that still changes a double.
SERIES_EPS = 1e-17

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_WINITZKI_A = 0.147


# ------------- Taylor remainders (cancellation-free) -------------

def exp_remainder(x: float, order: int) -> float:
    """
    Return e^x minus its Taylor polynomial of degree order-1,
    i.e. sum_{l >= order} x^l / l!.

    Args:
        x: Argument
        order: Index of the first retained term (>= 0)

    Returns:
        float: The remainder, computed without cancellation for |x| < SERIES_CUTOFF
    """
    if order < 0:
        raise DomainError(f"order must be >= 0 (got {order})")
    if abs(x) >= SERIES_CUTOFF:
        head = 0.0
        term = 1.0
        for l in range(order):
            head += term
            term *= x / (l + 1)
        return math.exp(x) - head

    term = x ** order / math.factorial(order)
    total = 0.0
    l = order
    while True:
        total += term
        l += 1
        term *= x / l
        if abs(term) <= SERIES_EPS * abs(total) or term == 0.0:
            return total


def sinh_remainder(x: float) -> float:
    """sinh(x) - x."""
    if abs(x) >= SERIES_CUTOFF:
        return math.sinh(x) - x
    return 0.5 * (exp_remainder(x, 3) - exp_remainder(-x, 3))


def cosh_remainder(x: float) -> float:
    """cosh(x) - 1 - x^2/2."""
    if abs(x) >= SERIES_CUTOFF:
        return math.cosh(x) - 1.0 - 0.5 * x * x
    return 0.5 * (exp_remainder(x, 4) + exp_remainder(-x, 4))


# ------------- Poisson statistics -------------

def poisson_pmf(X: float, l: int) -> float:
    """
    Probability of exactly l photons in a Poisson pulse of mean X.

    Args:
        X: Mean photon number per pulse (>= 0)
        l: Photon number (>= 0)

    Returns:
        float: e^{-X} X^l / l!, evaluated in log space
    """
    if X < 0 or l < 0:
        raise DomainError(f"poisson_pmf needs X >= 0 and l >= 0 (got X={X}, l={l})")
    if X == 0:
        return 1.0 if l == 0 else 0.0
    return math.exp(-X + l * math.log(X) - math.lgamma(l + 1))


def poisson_tail(X: float, k: int) -> float:
    """
    Probability of k or more photons in a Poisson pulse of mean X.

    Whenever X < k the tail is summed upward from psi_k (the terms shrink
    geometrically), which is the Taylor remainder of e^X times e^{-X}; this
    covers the small-X region of the k <= 2 complements without cancellation.

    Args:
        X: Mean photon number per pulse (>= 0)
        k: Threshold photon number (>= 0)

    Returns:
        float: psi_{>=k}(X)
    """
    if X < 0 or k < 0:
        raise DomainError(f"poisson_tail needs X >= 0 and k >= 0 (got X={X}, k={k})")
    if k == 0:
        return 1.0
    if X == 0:
        return 0.0
    if k == 1:
        return -math.expm1(-X)
    if X < k:
        term = poisson_pmf(X, k)
        total = 0.0
        l = k
        while term > SERIES_EPS * total and term > 0.0:
            total += term
            l += 1
            term *= X / l
        return total
    if k == 2:
        return -math.expm1(-X) - X * math.exp(-X)
    head = sum(poisson_pmf(X, l) for l in range(k))
    return max(0.0, 1.0 - head)


# ------------- Information measures -------------

def binary_entropy(p: float) -> float:
    """
    Binary entropy in bits, with h(0) = h(1) = 0.

    Args:
        p: Probability in [0, 1]

    Returns:
        float: -p log2 p - (1-p) log2 (1-p)
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"binary_entropy needs p in [0, 1] (got {p})")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def _inverse_erf_start(z: float) -> float:
    # Winitzki's closed-form approximation, relative error ~2e-3
    log_term = math.log((1.0 - z) * (1.0 + z))
    a = 2.0 / (math.pi * _WINITZKI_A) + 0.5 * log_term
    return math.copysign(math.sqrt(math.sqrt(a * a - log_term / _WINITZKI_A) - a), z)


def inverse_erf(z: float) -> float:
    """
    Inverse error function.

    Starts from a closed-form approximation and applies Halley steps against
    math.erf (math.erfc in the upper half, so that 1 - z keeps full precision).

    Args:
        z: Value in the open interval (-1, 1)

    Returns:
        float: w with erf(w) = z
    """
    if not -1.0 < z < 1.0:
        raise DomainError(f"inverse_erf needs |z| < 1 (got {z})")
    if z == 0.0:
        return 0.0
    if z < 0.0:
        return -inverse_erf(-z)

    w = _inverse_erf_start(z)
    tail = 1.0 - z
    for _ in range(8):
        if z > 0.5:
            residual = tail - math.erfc(w)
        else:
            residual = math.erf(w) - z
        slope = _TWO_OVER_SQRT_PI * math.exp(-w * w)
        step = residual / (slope + w * residual)
        w -= step
        if abs(step) <= 1e-16 * max(1.0, abs(w)):
            break
    return w


def attack_margin_xi(n1: float, epsilon: float) -> float:
    """
    Statistical margin added to the single-photon error rate.

    Args:
        n1: Expected sifted bits from single-photon pulses (> 0)
        epsilon: Probability that an attack on a single photon succeeds, in (0, 1]

    Returns:
        float: erfinv(1 - epsilon) / sqrt(2 n1)
    """
    if n1 <= 0:
        raise DomainError(f"attack_margin_xi needs n1 > 0 (got {n1})")
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon must lie in (0, 1] (got {epsilon})")
    if epsilon == 0.0:
        raise InfeasibleError("epsilon = 0 makes the attack margin diverge")
    if epsilon == 1.0:
        return 0.0
    return inverse_erf(1.0 - epsilon) / math.sqrt(2.0 * n1)


def renyi_info_max(zeta: float) -> float:
    """
    Maximum expected Renyi information per attacked single-photon bit.

    Clamped to one bit for zeta >= 1/3, where the squared term vanishes.

    Args:
        zeta: Renormalized error rate (>= 0)

    Returns:
        float: 1 + log2[1 - ((1 - 3 zeta) / (1 - zeta))^2 / 2]
    """
    if zeta < 0:
        raise DomainError(f"renyi_info_max needs zeta >= 0 (got {zeta})")
    if zeta >= 1.0 / 3.0:
        return 1.0
    ratio = (1.0 - 3.0 * zeta) / (1.0 - zeta)
    return 1.0 + math.log2(1.0 - 0.5 * ratio * ratio)


__all__ = [
    "exp_remainder", "sinh_remainder", "cosh_remainder",
    "poisson_pmf", "poisson_tail",
    "binary_entropy", "inverse_erf", "attack_margin_xi", "renyi_info_max",
]
