#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Logarithmic-order capacity staircase.

With a total budget E per codeword, the best achievable rate log|code|/log N
at error level eps is

    C_l(eps, E) = sup { m >= 0 : sum_{n<=m} e^{-E} E^n / n! <= eps }

and the inverse question (how much energy to reach staircase step m at error
eps) is answered by min_energy. When even m = 0 is out of reach (e^{-E} > eps)
the supremum is over an empty set; that case is reported as NO_POSITIVE_RATE,
never as 0.
"""

import enum
import math
from dataclasses import dataclass
from typing import Iterable, List, Union

import numpy as np
from scipy.optimize import bisect

from numerics import DomainError, log_sum, poisson_pmf_log

# relative slack on eps that still counts as a boundary tie ("<= eps")
TIE_RTOL = 1e-12
BISECT_XTOL = 1e-10
BISECT_MAXITER = 200
TAIL_MARGIN = 50.0


class NoPositiveRate(enum.Enum):
    TOKEN = "none"

    def __str__(self) -> str:
        return "none"


NO_POSITIVE_RATE = NoPositiveRate.TOKEN


@dataclass(frozen=True)
class LogLawResult:
    m_star: Union[int, NoPositiveRate]
    cdf_at_m: float
    cdf_at_m_plus_1: float

    @property
    def has_rate(self) -> bool:
        return self.m_star is not NO_POSITIVE_RATE


def _check_E(E: float) -> float:
    if E is None or not math.isfinite(E) or E < 0:
        raise DomainError(f"energy budget must be finite and >= 0, got {E}")
    return float(E)


def _tail_cutoff(E: float, m: int) -> int:
    # beyond this the Poisson(E) terms are far below double precision
    return int(m + 60 + E + 40.0 * math.sqrt(E + 1.0))


def poisson_log_cdf(E: float, m: int) -> float:
    E = _check_E(E)
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    return min(0.0, log_sum(poisson_pmf_log(E, np.arange(m + 1))))


def poisson_cdf(E: float, m: int) -> float:
    """sum_{n=0}^m e^{-E} E^n / n!, accumulated in log space."""
    return float(math.exp(poisson_log_cdf(E, m)))


def poisson_upper_tail(E: float, m: int) -> float:
    """sum_{n>m} e^{-E} E^n / n!, summed from its own terms (not 1 - cdf)."""
    E = _check_E(E)
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    n = np.arange(m + 1, _tail_cutoff(E, m) + 1)
    return float(math.exp(log_sum(poisson_pmf_log(E, n))))


def _admissible(cdf, epsilon: float):
    return cdf <= epsilon * (1.0 + TIE_RTOL)


def _window(E: float, log_gap: float) -> np.ndarray:
    """
    Log pmf over 0..n_hi, with n_hi past 2E and its last term more than
    e^TAIL_MARGIN below the gap 1 - eps, so the unseen tail cannot matter.
    """
    n_hi = _tail_cutoff(E, 0)
    while True:
        log_pmf = np.asarray(poisson_pmf_log(E, np.arange(n_hi + 1)), dtype=np.float64)
        if n_hi >= 2.0 * E + 1.0 and log_pmf[-1] < log_gap - TAIL_MARGIN:
            return log_pmf
        n_hi *= 2


def log_capacity(epsilon: float, E: float) -> LogLawResult:
    """
    Largest m >= 0 with poisson_cdf(E, m) <= epsilon, together with the two
    partial sums that bracket epsilon.

    Below eps = 1/2 the cdf is compared with eps in log space; above it the
    upper tail is compared with 1 - eps, which keeps eps close to 1 resolvable.
    """
    if epsilon is None or not (0.0 <= epsilon < 1.0):
        raise DomainError(f"epsilon must lie in [0, 1), got {epsilon}")
    E = _check_E(E)

    log_gap = math.log1p(-epsilon)
    log_pmf = _window(E, log_gap)
    log_cdf = np.minimum(np.logaddexp.accumulate(log_pmf), 0.0)
    if epsilon <= 0.5:
        log_eps = math.log(epsilon) if epsilon > 0 else -np.inf
        admissible = log_cdf <= log_eps + math.log1p(TIE_RTOL)
    else:
        # log of sum_{n>m} over the window; the last entry has an empty tail
        log_tail = np.append(np.logaddexp.accumulate(log_pmf[::-1])[::-1][1:], -np.inf)
        admissible = log_tail >= log_gap + math.log1p(-TIE_RTOL)

    first_out = int(np.argmin(admissible))
    cdf = np.exp(log_cdf)
    if first_out == 0:
        return LogLawResult(NO_POSITIVE_RATE, 0.0, float(cdf[0]))
    m = first_out - 1
    return LogLawResult(m, float(cdf[m]), float(cdf[m + 1]))


def min_energy(m: int, epsilon: float) -> float:
    """
    Smallest E with poisson_cdf(E, m) <= epsilon.

    m = 0 is closed form (-ln eps). Otherwise the cdf is strictly decreasing in
    E, so bisect on [0, hi] and step to the upper side of the bracket so that
    the returned E is admissible.
    """
    if m is None or int(m) != m or m < 0:
        raise DomainError(f"m must be a nonnegative integer, got {m}")
    if epsilon is None or not (0.0 < epsilon < 1.0):
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    m = int(m)
    if m == 0:
        return -math.log(epsilon)

    def excess(E: float) -> float:
        return poisson_cdf(E, m) - epsilon

    hi = max(1.0, float(m))
    while excess(hi) > 0:
        hi *= 2.0
    root = bisect(excess, 0.0, hi, xtol=BISECT_XTOL, maxiter=BISECT_MAXITER)

    E = root
    for _ in range(BISECT_MAXITER):
        if _admissible(poisson_cdf(E, m), epsilon):
            return E
        E += BISECT_XTOL
    return E


def staircase(epsilon: float, E_values: Iterable[float]) -> List[LogLawResult]:
    return [log_capacity(epsilon, E) for E in E_values]
