#!/usr/bin/env python3
"""
Pulse Simulator
Monte Carlo pulse stream for checking the sifting and error statistics.

For every pulse:
1. Draw the photon number from Poisson(mu)
2. Thin each photon by eta * alpha (channel survival and detection)
3. Register the pulse if a photon is detected or a dark count fires (r_d)
4. Keep registered pulses through sifting with probability 1/2
5. Mark errors: a pulse with a dark count carries a random bit (error 1/2),
   otherwise a photon-registered pulse errs with probability r_c

Pulses with a dark count or exactly one detected photon form the
single-photon subset. Pulses are processed in fixed-size shards, shard i
drawing from Philox(SeedSequence(seed, spawn_key=(i,))), so the tallies
depend on the seed alone.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from link_budget.errors import DomainError, ResourceError
from link_budget.parameters import LinkParameters

MAX_PULSES = 10 ** 8
SHARD_PULSES = 2 ** 18
RNG_ALGORITHM = "numpy.Philox(SeedSequence(seed, spawn_key=(shard,)))"


@dataclass(frozen=True)
class SimulationOutcome:
    pulses: int
    sifted: int
    errors: int
    sifted_single_photon: int
    errors_single_photon: int
    seed: int
    algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        if not (0 <= self.errors <= self.sifted and
                0 <= self.errors_single_photon <= self.sifted_single_photon <= self.sifted):
            raise DomainError(f"inconsistent simulation tallies: {self}")


def _simulate_shard(index: int, pulses: int, link: LinkParameters, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))
    survive = link.detector.eta * link.channel.alpha

    photons = rng.poisson(link.source.mu, pulses)
    detected = rng.binomial(photons, survive)
    dark = rng.random(pulses) < link.detector.r_d
    sifted = ((detected > 0) | dark) & (rng.random(pulses) < 0.5)

    error_draw = rng.random(pulses)
    errors = sifted & np.where(dark, error_draw < 0.5, error_draw < link.channel.r_c)
    single = sifted & (dark | (detected == 1))

    return np.array([
        np.count_nonzero(sifted),
        np.count_nonzero(errors),
        np.count_nonzero(single),
        np.count_nonzero(errors & single),
    ], dtype=np.int64)


def simulate_block(m: int, link: LinkParameters, seed: int, workers: int = 1) -> SimulationOutcome:
    """
    Simulate m pulses and tally the sifted and error counts.

    Args:
        m: Number of pulses (0 <= m <= MAX_PULSES)
        link: Link parameters
        seed: 64-bit unsigned seed
        workers: Threads used for shards; the result does not depend on it

    Returns:
        SimulationOutcome: Empirical counterparts of n, e_T, n1 and e_T1
    """
    m = int(m)
    if m > MAX_PULSES:
        raise ResourceError(f"simulate_block supports at most {MAX_PULSES} pulses (got {m})")
    if m < 0:
        raise DomainError(f"simulate_block needs m >= 0 (got {m})")
    if not 0 <= seed < 2 ** 64:
        raise DomainError(f"seed must be a 64-bit unsigned integer (got {seed})")

    shard_sizes = [SHARD_PULSES] * (m // SHARD_PULSES)
    if m % SHARD_PULSES:
        shard_sizes.append(m % SHARD_PULSES)

    def run(index: int) -> np.ndarray:
        return _simulate_shard(index, shard_sizes[index], link, seed)

    totals = np.zeros(4, dtype=np.int64)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        for tally in executor.map(run, range(len(shard_sizes))):
            totals += tally

    sifted, errors, single, single_errors = (int(v) for v in totals)
    return SimulationOutcome(
        pulses=m, sifted=sifted, errors=errors,
        sifted_single_photon=single, errors_single_photon=single_errors, seed=seed,
    )


__all__ = ["SimulationOutcome", "simulate_block", "MAX_PULSES", "SHARD_PULSES"]
