#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Error lower bound for codes with a total photon budget E, and three
independent ways of reproducing the optimal success probability of the
symmetric family

    |f_i> = sqrt(p)|0> + sqrt(1-p)|i>,   i = 1..M,   p = e^{-E}

  covariant_success          closed form ((1/M)sqrt(1+(M-1)p) + (1-1/M)sqrt(1-p))^2
  srm_success_oracle         square-root measurement from a numerical Gram eigensolve
  explicit_povm_check        SRM operators built explicitly in dimension M+1
  covariant_measurement_check  the covariant POVM |u_j> = |S'>/sqrt(M) + sqrt((M-1)/M)|j'>

The bound itself is 1 - covariant_success(M, e^{-E}). It is evaluated as
(1-s)(1+s) with

    1 - s = (M-1) p^2 / ((1+u)(1+v)(u+v)),  u = sqrt(1+(M-1)p),  v = sqrt(1-p)

which has no cancellation, so errors down to ~1e-300 are representable.
"""

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import orth
from scipy.optimize import bisect

from numerics import (
    ConditioningWarning,
    DomainError,
    eigh,
    eigvalsh_desc,
    projector,
)

# Gram eigenvalues below this fraction of the largest are treated as zero
COINCIDENT_RTOL = 1e-12
ORACLE_MAX_M = 256
EXPLICIT_MAX_M = 64
BISECT_XTOL = 1e-10
BISECT_MAXITER = 200


# ------------------------ ensemble ------------------------


@dataclass(frozen=True)
class SymmetricEnsemble:
    M: float
    p: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.M) or self.M < 1:
            raise DomainError(f"M must be >= 1, got {self.M}")
        if not (0.0 <= self.p <= 1.0):
            raise DomainError(f"p must lie in [0, 1], got {self.p}")

    @classmethod
    def from_energy(cls, E: float, M: float) -> "SymmetricEnsemble":
        if not math.isfinite(E) or E < 0:
            raise DomainError(f"energy budget must be finite and >= 0, got {E}")
        return cls(M=M, p=math.exp(-E))

    def integer_M(self, lo: int, hi: int) -> int:
        if int(self.M) != self.M or not (lo <= self.M <= hi):
            raise DomainError(f"this check needs an integer M in [{lo}, {hi}], got {self.M}")
        return int(self.M)

    def gram(self) -> np.ndarray:
        """G_ii = 1, G_ij = p."""
        M = self.integer_M(1, ORACLE_MAX_M)
        return (1.0 - self.p) * np.eye(M) + self.p * np.ones((M, M))

    def vectors(self) -> np.ndarray:
        """Columns |f_1>..|f_M> in the basis |0>, |1>, ..., |M>."""
        M = self.integer_M(1, ORACLE_MAX_M)
        F = np.zeros((M + 1, M), dtype=np.complex128)
        F[0, :] = math.sqrt(self.p)
        F[np.arange(1, M + 1), np.arange(M)] = math.sqrt(1.0 - self.p)
        return F


def _one_minus_s(M: float, p: float) -> float:
    u = math.sqrt(1.0 + (M - 1.0) * p)
    v = math.sqrt(1.0 - p)
    return (M - 1.0) * p * p / ((1.0 + u) * (1.0 + v) * (u + v))


def covariant_success(ens: SymmetricEnsemble) -> float:
    d = _one_minus_s(ens.M, ens.p)
    return (1.0 - d) ** 2


def error_lower_bound(E: float, M: float) -> float:
    """
    Lower bound on the average error of any code with M codewords whose
    states each carry mean photon number <= E.
    """
    ens = SymmetricEnsemble.from_energy(E, M)
    d = _one_minus_s(ens.M, ens.p)
    return d * (2.0 - d)


# ------------------------ oracles ------------------------


def srm_success_oracle(ens: SymmetricEnsemble) -> float:
    """
    Square-root-measurement success for a geometrically uniform pure-state set:
    ((1/M) sum_j sqrt(mu_j))^2 over the Gram eigenvalues, which come from a
    general numerical eigensolve rather than the known two-level spectrum.
    """
    M = ens.integer_M(2, ORACLE_MAX_M)
    mu = eigvalsh_desc(ens.gram())
    keep = mu > COINCIDENT_RTOL * mu[0]
    if not np.all(keep):
        warnings.warn(
            f"Gram matrix is numerically singular (M={M}, p={ens.p}); "
            f"treating {int(np.sum(~keep))} eigenvalue(s) as zero",
            ConditioningWarning,
            stacklevel=2,
        )
    mu = np.where(keep, mu, 0.0)
    return float((np.sum(np.sqrt(mu)) / M) ** 2)


@dataclass(frozen=True)
class PovmReport:
    completeness_residual: float
    success_probability: float
    expected_success: float
    singular: bool

    @property
    def success_gap(self) -> float:
        return abs(self.success_probability - self.expected_success)

    @property
    def holds(self) -> bool:
        return self.completeness_residual <= 1e-10 and self.success_gap <= 1e-10


def explicit_povm_check(ens: SymmetricEnsemble) -> PovmReport:
    """
    Build |f_i> explicitly, form Y_j = |u_j><u_j| with U = F G^{-1/2} (pseudo
    inverse on the span when G is numerically singular) and compare sum_j Y_j
    with an independently computed projector onto span{|f_i>}.
    """
    M = ens.integer_M(2, EXPLICIT_MAX_M)
    F = ens.vectors()
    G = F.conj().T @ F
    w, V = eigh(G)

    keep = w > COINCIDENT_RTOL * w[0]
    singular = not bool(np.all(keep))
    if singular:
        warnings.warn(
            f"Gram matrix is numerically singular (M={M}, p={ens.p}); "
            "using the pseudo-inverse on the span",
            ConditioningWarning,
            stacklevel=2,
        )
    Vk = V[:, keep]
    G_inv_sqrt = (Vk / np.sqrt(w[keep])) @ Vk.conj().T
    U = F @ G_inv_sqrt

    Y_sum = U @ U.conj().T
    P_span = projector(orth(F))
    residual = float(np.max(np.abs(Y_sum - P_span)))

    overlaps = np.diag(F.conj().T @ U)
    success = float(np.mean(np.abs(overlaps) ** 2))
    return PovmReport(residual, success, covariant_success(ens), singular)


@dataclass(frozen=True)
class CovariantReport:
    success_probability: float
    expected_success: float
    projector_residual: float
    overlap_residual: float

    @property
    def holds(self) -> bool:
        return (
            abs(self.success_probability - self.expected_success) <= 1e-10
            and self.projector_residual <= 1e-10
            and self.overlap_residual <= 1e-10
        )


def covariant_measurement_check(ens: SymmetricEnsemble) -> CovariantReport:
    """
    The covariant POVM: |S> the uniform superposition of |1>..|M>, |S'> the
    normalised average of the |f_i>, |j'> the part of |j> orthogonal to |S>.
    sum_j |u_j><u_j| must be a projector that contains every |f_i>.
    """
    M = ens.integer_M(2, ORACLE_MAX_M)
    p = ens.p
    dim = M + 1
    basis = np.eye(dim, dtype=np.complex128)

    S = basis[:, 1:].sum(axis=1) / math.sqrt(M)
    S_prime = (math.sqrt(p) * basis[:, 0] + math.sqrt(1.0 - p) * S / math.sqrt(M)) / math.sqrt(
        p + (1.0 - p) / M
    )
    J_prime = math.sqrt(M / (M - 1.0)) * (basis[:, 1:] - S[:, None] / math.sqrt(M))
    U = S_prime[:, None] / math.sqrt(M) + math.sqrt((M - 1.0) / M) * J_prime

    Y_sum = U @ U.conj().T
    projector_residual = float(np.max(np.abs(Y_sum @ Y_sum - Y_sum)))

    F = ens.vectors()
    overlap_residual = float(np.max(np.linalg.norm(F - Y_sum @ F, axis=0)))
    success = float(np.mean(np.abs(np.sum(F.conj() * U, axis=0)) ** 2))
    return CovariantReport(success, covariant_success(ens), projector_residual, overlap_residual)


# ------------------------ asymptotic regimes ------------------------


class Regime(enum.Enum):
    RATE_DOMINANT = "rate"          # E - R -> -inf
    BALANCED = "balanced"           # E - R -> A
    ENERGY_DOMINANT = "energy"      # E - R -> +inf


@dataclass(frozen=True)
class RegimeTag:
    regime: Regime
    A: Optional[float] = None

    def __post_init__(self) -> None:
        if self.regime is Regime.BALANCED and (self.A is None or not math.isfinite(self.A)):
            raise DomainError("the balanced regime needs a finite A")


def classify_regime(E: float, R: float, window: float = 5.0) -> RegimeTag:
    gap = E - R
    if gap < -window:
        return RegimeTag(Regime.RATE_DOMINANT)
    if gap > window:
        return RegimeTag(Regime.ENERGY_DOMINANT)
    return RegimeTag(Regime.BALANCED, gap)


def balanced_coefficient(A: float) -> float:
    """1 + 2e^A - 2 sqrt(e^A (1+e^A)) written as (sqrt(1+x) - sqrt(x))^2."""
    x = math.exp(A)
    return 1.0 / (math.sqrt(1.0 + x) + math.sqrt(x)) ** 2


def asymptotic_error(E: float, R: float, tag: RegimeTag) -> float:
    if not math.isfinite(E) or E < 0:
        raise DomainError(f"energy budget must be finite and >= 0, got {E}")
    if not math.isfinite(R) or R < 0:
        raise DomainError(f"R must be finite and >= 0, got {R}")
    p = math.exp(-E)
    if tag.regime is Regime.ENERGY_DOMINANT:
        return 0.25 * math.exp(-2.0 * E + R)
    if tag.regime is Regime.BALANCED:
        return balanced_coefficient(tag.A) * p
    # the square-root correction is negative: the bound approaches e^{-E} from below
    return p - 2.0 * math.sqrt(1.0 - p) * math.exp(-(E + R) / 2.0) + (2.0 - 3.0 * p) * math.exp(-R)


# ------------------------ inverse ------------------------


def min_energy_for_error(M: float, target: float) -> float:
    """Smallest E with error_lower_bound(E, M) <= target."""
    if not math.isfinite(target) or target <= 0:
        raise DomainError(f"target error must be > 0, got {target}")
    if target >= 1.0 - 1.0 / M:
        return 0.0

    def excess(E: float) -> float:
        return error_lower_bound(E, M) - target

    hi = 1.0
    while excess(hi) > 0:
        hi *= 2.0
        if hi > 1e6:
            raise DomainError(f"target error {target} is below what any finite budget reaches")
    root = bisect(excess, 0.0, hi, xtol=BISECT_XTOL, maxiter=BISECT_MAXITER)
    E = root
    for _ in range(BISECT_MAXITER):
        if excess(E) <= 0:
            return E
        E += BISECT_XTOL
    return E
