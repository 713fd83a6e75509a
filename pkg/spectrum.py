#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Spectrum of unitarily invariant coherent-state mixtures over N modes.

An input distribution that is invariant under U(C^N) is fixed by its radial
part: atoms (r_k, q_k) with r_k^2 <= E. The averaged state is block diagonal
in total photon number n,

    sigma = sum_n lambda_n Pi_n,   lambda_n = w_n / C(N+n-1, n),
    w_n   = sum_k q_k e^{-r_k^2} r_k^{2n} / n!,

so everything here is an exact scalar sum over blocks; no sphere sampling and
no large matrices. The spectral CDF is

    Tr sigma { -log(sigma)/log(N) <= c } = sum of w_n over blocks with
                                            -ln(lambda_n)/ln(N) <= c.
"""

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp, pdtr, pdtrc
from scipy.stats import poisson

from loglaw import poisson_cdf
from numerics import (
    DomainError,
    eigvalsh_desc,
    is_density,
    is_unitary,
    log_binomial,
    poisson_pmf_log,
)

DEFAULT_TOL = 1e-12
SUPPORT_RTOL = 1e-12
CHECK_ATOL = 1e-12


# ------------------------ mixtures ------------------------


@dataclass(frozen=True)
class RadialMixture:
    radii: Tuple[float, ...]
    weights: Tuple[float, ...]
    E: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.E) or self.E < 0:
            raise DomainError(f"energy budget must be finite and >= 0, got {self.E}")
        if len(self.radii) == 0 or len(self.radii) != len(self.weights):
            raise DomainError("a mixture needs one weight per radius and at least one atom")
        if any(q <= 0 for q in self.weights):
            raise DomainError("mixture weights must be > 0")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise DomainError(f"mixture weights sum to {math.fsum(self.weights)!r}, not 1")
        limit = math.sqrt(self.E) * (1.0 + SUPPORT_RTOL)
        if any(r < 0 or r > limit for r in self.radii):
            raise DomainError(f"radii must lie in [0, sqrt(E)] = [0, {math.sqrt(self.E)}]")

    @classmethod
    def delta(cls, E: float) -> "RadialMixture":
        return cls(radii=(math.sqrt(E),), weights=(1.0,), E=E)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[float, float]], E: float) -> "RadialMixture":
        radii = tuple(float(r) for r, _ in pairs)
        weights = tuple(float(q) for _, q in pairs)
        return cls(radii=radii, weights=weights, E=E)

    @classmethod
    def random(cls, E: float, k: int, rng: np.random.Generator) -> "RadialMixture":
        radii = rng.uniform(0.0, math.sqrt(E), size=k)
        q = rng.dirichlet(np.ones(k))
        q = q / math.fsum(q)
        return cls(radii=tuple(float(r) for r in radii), weights=tuple(float(x) for x in q), E=E)

    @property
    def E_max(self) -> float:
        return max(r * r for r in self.radii)


@dataclass(frozen=True)
class SpectralBlock:
    n: int
    weight: float
    log_eigenvalue: float
    log_multiplicity: float


# ------------------------ blocks ------------------------


def block_log_weights(n: np.ndarray, mix: RadialMixture) -> np.ndarray:
    n = np.asarray(n)
    per_atom = np.stack(
        [math.log(q) + np.asarray(poisson_pmf_log(r * r, n), dtype=np.float64) for r, q in zip(mix.radii, mix.weights)]
    )
    return logsumexp(per_atom, axis=0)


def block_weight(n: int, mix: RadialMixture) -> float:
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return float(np.exp(block_log_weights(np.array([n]), mix)[0]))


def log_multiplicities(n_max: int, N: int) -> np.ndarray:
    """ln C(N+n-1, n) for n = 0..n_max as a running sum of log1p((N-1)/i)."""
    i = np.arange(1, n_max + 1, dtype=np.float64)
    return np.concatenate(([0.0], np.cumsum(np.log1p((N - 1.0) / i))))


def block_log_eigenvalue(n: int, N: int, mix: RadialMixture) -> float:
    """ln lambda_n^N; -inf when the block carries no weight."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    log_w = float(block_log_weights(np.array([n]), mix)[0])
    if log_w == -np.inf:
        return -np.inf
    return log_w - log_binomial(N + n - 1, N - 1)


def truncation_point(mix: RadialMixture, tol: float = DEFAULT_TOL) -> int:
    """Smallest n whose Poisson(E_max) upper tail is below tol."""
    if tol <= 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    mu = mix.E_max
    if mu == 0:
        return 0
    n = max(int(poisson.isf(tol, mu)) - 1, 0)
    while pdtrc(n, mu) >= tol:
        n += 1
    while n > 0 and pdtrc(n - 1, mu) < tol:
        n -= 1
    return n


def _blocks(n_max: int, N: int, mix: RadialMixture) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = np.arange(n_max + 1)
    log_w = block_log_weights(n, mix)
    log_mult = log_multiplicities(n_max, N)
    return log_w, log_w - log_mult, log_mult


def block_table(N: int, mix: RadialMixture, tol: float = DEFAULT_TOL) -> List[SpectralBlock]:
    n_max = truncation_point(mix, tol)
    log_w, log_eig, log_mult = _blocks(n_max, N, mix)
    return [
        SpectralBlock(n=int(n), weight=float(np.exp(log_w[n])), log_eigenvalue=float(log_eig[n]),
                      log_multiplicity=float(log_mult[n]))
        for n in range(n_max + 1)
    ]


# ------------------------ spectral CDF and bounds ------------------------


def spectral_cdf(c: float, N: int, mix: RadialMixture, tol: float = DEFAULT_TOL) -> float:
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    if tol <= 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    if c < 0:
        return 0.0
    # blocks past the truncation point carry less than tol in total
    log_w, log_eig, _ = _blocks(truncation_point(mix, tol), N, mix)
    with np.errstate(invalid="ignore"):
        level = -log_eig / math.log(N)
    inside = level <= c
    return min(1.0, math.fsum(np.exp(log_w[inside])))


def _check_noninteger(c: float) -> int:
    if not math.isfinite(c) or c <= 0:
        raise DomainError(f"c must be a positive finite number, got {c}")
    if c == math.floor(c):
        raise DomainError(f"c must not be an integer, got {c}")
    return int(math.floor(c))


def _head_weight(m: int, mix: RadialMixture) -> float:
    """sum_{n<=m} w_n as a mixture of Poisson cdfs."""
    return math.fsum(q * float(pdtr(m, r * r)) for r, q in zip(mix.radii, mix.weights))


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    holds: bool


def upper_bound_check(c: float, N: int, mix: RadialMixture, tol: float = DEFAULT_TOL) -> BoundReport:
    """spectral_cdf(c) <= sum_{n <= floor(c)} w_n."""
    m = _check_noninteger(c)
    lhs = spectral_cdf(c, N, mix, tol)
    rhs = _head_weight(m, mix)
    return BoundReport(lhs=lhs, rhs=rhs, holds=lhs <= rhs + CHECK_ATOL)


def l_bound(n: int, c: float, N: int, E: float) -> float:
    """L_n(N) = (e^E n! (1+(n-1)/N)^n N^{n-c})^{1/n}."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    log_L = (E + gammaln(n + 1.0) + n * math.log1p((n - 1.0) / N) + (n - c) * math.log(N)) / n
    return math.exp(log_L)


@dataclass(frozen=True)
class LowerBoundReport:
    deficit: float
    bound: float
    condition_met: bool
    holds: bool


def lower_bound_check(c: float, N: int, mix: RadialMixture, tol: float = DEFAULT_TOL) -> LowerBoundReport:
    """
    With m = floor(c): sum_{n<=m} w_n - spectral_cdf(c) <= max_{1<=n<=m} (1 - e^{-L_n(N)})
    whenever N >= e^{E/c}. Below that N the check is vacuous.
    """
    m = _check_noninteger(c)
    deficit = _head_weight(m, mix) - spectral_cdf(c, N, mix, tol)
    bound = max((-math.expm1(-l_bound(n, c, N, mix.E)) for n in range(1, m + 1)), default=0.0)
    condition_met = math.log(N) >= mix.E / c
    holds = (not condition_met) or deficit <= bound + CHECK_ATOL
    return LowerBoundReport(deficit=deficit, bound=bound, condition_met=condition_met, holds=holds)


def limit_convergence(c: float, E: float, N_list: Iterable[int], tol: float = DEFAULT_TOL) -> List[float]:
    """|spectral_cdf(c, N, delta at sqrt E) - poisson_cdf(E, floor c)| for each N."""
    m = _check_noninteger(c)
    N_list = list(N_list)
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise DomainError("N_list must be strictly increasing")
    mix = RadialMixture.delta(E)
    target = poisson_cdf(E, m)
    return [abs(spectral_cdf(c, N, mix, tol) - target) for N in N_list]


@dataclass(frozen=True)
class SandwichReport:
    neg_log_ratio: float
    bound: float
    strict_form_holds: bool
    holds: bool


def eigenvalue_sandwich_check(n: int, N: int, mix: RadialMixture) -> SandwichReport:
    """
    lambda_n <= n! w_n N^{-n}, i.e. -ln(lambda_n)/ln N >= n - ln(n! w_n)/ln N.
    strict_form_holds reports the stronger lambda_n <= N^{-n}, which needs
    n! w_n <= 1.
    """
    if n < 1 or N < 2:
        raise DomainError(f"need n >= 1 and N >= 2, got n={n}, N={N}")
    log_N = math.log(N)
    log_eig = block_log_eigenvalue(n, N, mix)
    if log_eig == -np.inf:
        return SandwichReport(np.inf, float(n), True, True)
    log_w = float(block_log_weights(np.array([n]), mix)[0])
    ratio = -log_eig / log_N
    bound = n - (gammaln(n + 1.0) + log_w) / log_N
    return SandwichReport(
        neg_log_ratio=ratio,
        bound=float(bound),
        strict_form_holds=ratio >= n - CHECK_ATOL,
        holds=ratio >= bound - CHECK_ATOL,
    )


# ------------------------ Ky Fan ------------------------


def ky_fan_check(rho: np.ndarray, U: np.ndarray, t: float, k: int) -> BoundReport:
    """
    sum_{j<=k} lambda_j(t rho + (1-t) U rho U^dag) <= sum_{j<=k} lambda_j(rho):
    mixing a state with a unitary copy of itself cannot sharpen its spectrum.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if not is_density(rho):
        raise DomainError("rho must be a density matrix (Hermitian, PSD, trace 1)")
    if not is_unitary(U):
        raise DomainError("U must be unitary within 1e-12")
    if U.shape != rho.shape:
        raise DomainError(f"U has shape {U.shape}, rho has {rho.shape}")
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"t must lie in [0, 1], got {t}")
    dim = rho.shape[0]
    if not (1 <= k <= dim):
        raise DomainError(f"k must lie in 1..{dim}, got {k}")

    mixed = t * rho + (1.0 - t) * (U @ rho @ U.conj().T)
    mixed = 0.5 * (mixed + mixed.conj().T)
    lhs = math.fsum(eigvalsh_desc(mixed)[:k])
    rhs = math.fsum(eigvalsh_desc(rho)[:k])
    return BoundReport(lhs=lhs, rhs=rhs, holds=lhs <= rhs + CHECK_ATOL)
