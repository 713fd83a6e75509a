#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Pulse-position modulation with an on-off decoder.

Message i is sent as the coherent pulse |alpha> (|alpha|^2 = E) in slot i of
N otherwise-vacuum slots; the decoder Y_i = |0><0| x .. x (I - |0><0|) x ..
clicks on the slot that received photons. With a noiseless channel the
unpulsed slots never click, so the only failure is a pulse that yields zero
photons:

    P(error) = |<0|alpha>|^2 = e^{-E}       (independent of N)

The incomplete remainder I - sum_i Y_i counts as an error.

simulate shards its trials across threads; shard k draws from the k-th child
of SeedSequence(seed), so a fixed (seed, shards) pair gives a fixed result.
"""

import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import pdtrc
from scipy.stats import binomtest
from tqdm import tqdm

from discrimination import error_lower_bound
from loglaw import log_capacity
from numerics import DomainError, poisson_pmf_log, spawn_rngs

CONSISTENCY_E = (0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 7.5, 10.0)
CONSISTENCY_N = (2, 3, 4, 8, 16, 64, 256, 10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)
MAX_SHARD_TRIALS = 1_000_000


@dataclass(frozen=True)
class PpmCode:
    N: int
    E: float

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N}")
        if self.E is None or not math.isfinite(self.E) or self.E < 0:
            raise DomainError(f"energy budget must be finite and >= 0, got {self.E}")


def exact_error(code: PpmCode) -> float:
    return math.exp(-code.E)


def decoder_success_fock(code: PpmCode, n_cut: int) -> float:
    """
    <alpha|(I - |0><0|)|alpha> from the number-basis amplitudes of |alpha>
    kept up to n_cut photons. Differs from 1 - e^{-E} by pdtrc(n_cut, E).
    """
    if int(n_cut) != n_cut or n_cut < 1:
        raise DomainError(f"n_cut must be a positive integer, got {n_cut}")
    amps = np.exp(0.5 * poisson_pmf_log(code.E, np.arange(int(n_cut) + 1)))
    return math.fsum(amps[1:] ** 2)


def fock_truncation_tail(code: PpmCode, n_cut: int) -> float:
    return float(pdtrc(int(n_cut), code.E))


def log_rate(code: PpmCode) -> float:
    """ln N / ln N: one message per slot on the logarithmic scale."""
    if code.N < 2:
        raise DomainError("the logarithmic rate needs N >= 2")
    return math.log(code.N) / math.log(code.N)


# ------------------------ Monte-Carlo ------------------------


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    errors: int
    empirical_error: float
    ci95: Tuple[float, float]
    sigma: float
    exact_error: float

    @property
    def deviation(self) -> float:
        """|empirical - exact| in units of sigma (0 when sigma is 0 and they agree)."""
        gap = abs(self.empirical_error - self.exact_error)
        if self.sigma == 0:
            return 0.0 if gap == 0 else math.inf
        return gap / self.sigma


def _shard_sizes(trials: int, shards: int) -> List[int]:
    base, extra = divmod(trials, shards)
    return [base + (1 if k < extra else 0) for k in range(shards)]


def _run_shard(code: PpmCode, size: int, rng: np.random.Generator) -> int:
    errors = 0
    remaining = size
    while remaining > 0:
        chunk = min(remaining, MAX_SHARD_TRIALS)
        messages = rng.integers(0, code.N, size=chunk)
        photons = rng.poisson(code.E, size=chunk)
        # only the pulsed slot can click; no click means no decision
        decoded = np.where(photons > 0, messages, -1)
        errors += int(np.count_nonzero(decoded != messages))
        remaining -= chunk
    return errors


def simulate(
    code: PpmCode,
    trials: int,
    seed: Optional[int],
    shards: int = 1,
    workers: int = 1,
    progress: bool = False,
) -> SimulationReport:
    if int(trials) != trials or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials}")
    if int(shards) != shards or shards < 1:
        raise DomainError(f"shards must be a positive integer, got {shards}")
    trials, shards = int(trials), int(shards)
    shards = min(shards, trials)

    sizes = _shard_sizes(trials, shards)
    rngs = spawn_rngs(seed, shards)
    counts: List[int] = [0] * shards

    pbar = tqdm(total=shards, unit="shard", desc="PPM trials", disable=not progress)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
        futures = {ex.submit(_run_shard, code, sizes[k], rngs[k]): k for k in range(shards)}
        for fut in as_completed(futures):
            counts[futures[fut]] = fut.result()
            pbar.update(1)
    pbar.close()

    errors = sum(counts)
    p_exact = exact_error(code)
    ci = binomtest(errors, trials).proportion_ci(confidence_level=0.95)
    return SimulationReport(
        trials=trials,
        errors=errors,
        empirical_error=errors / trials,
        ci95=(float(ci.low), float(ci.high)),
        sigma=math.sqrt(p_exact * (1.0 - p_exact) / trials),
        exact_error=p_exact,
    )


# ------------------------ consistency ------------------------


@dataclass(frozen=True)
class ConsistencyReport:
    E: float
    N: int
    achieved: float
    lower_bound: float
    holds: bool

    @property
    def gap(self) -> float:
        return self.achieved - self.lower_bound


def consistency_with_bound(code: PpmCode) -> ConsistencyReport:
    """The achieved e^{-E} can never beat the covariant-measurement lower bound."""
    if code.N < 2:
        raise DomainError("the comparison needs N >= 2 messages")
    achieved = exact_error(code)
    lower = error_lower_bound(code.E, code.N)
    return ConsistencyReport(code.E, code.N, achieved, lower, achieved >= lower * (1.0 - 1e-12))


def consistency_grid(
    E_values: Sequence[float] = CONSISTENCY_E,
    N_values: Sequence[int] = CONSISTENCY_N,
) -> List[ConsistencyReport]:
    return [consistency_with_bound(PpmCode(N=N, E=E)) for E in E_values for N in N_values]


def log_law_boundary_check(code: PpmCode) -> bool:
    """At eps = e^{-E} the staircase sits exactly on its first step m = 0."""
    return log_capacity(exact_error(code), code.E).m_star == 0
