#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Shared scalar numerics for photon-budget.

Everything probability-like is handled in natural-log space and only turned
back into linear scale at the edges (reports, CLI rows). The Hermitian
eigensolver is a thin, checked wrapper over numpy for the small matrices the
property sweeps build (dim <= 512).

Randomness:
  make_rng(seed)           -> numpy Generator (PCG64)
  spawn_rngs(seed, count)  -> independent child Generators, reproducible
                              from (seed, index)
"""

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

LogProb = float

MAX_EIGH_DIM = 512
HERMITIAN_ATOL = 1e-12
RESIDUAL_RTOL = 1e-10
# below this many trailing items a binomial is summed factor by factor
DIRECT_BINOMIAL_LIMIT = 1_000_000


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class EigenSolverError(RuntimeError):
    """The eigendecomposition failed its residual / orthonormality checks."""


class ConditioningWarning(UserWarning):
    """A matrix is numerically singular; a fallback was used."""


# ------------------------ log-space helpers ------------------------


def log_binomial(n: int, k: int) -> LogProb:
    """
    ln C(n, k).

    Small tails (min(k, n-k) <= DIRECT_BINOMIAL_LIMIT) are summed as
    sum(ln(n-j+i) - ln i), which keeps full relative precision even when n is
    huge; otherwise log-gamma differences are used.
    """
    if n < 0 or k < 0:
        raise DomainError(f"log_binomial needs nonnegative arguments, got n={n}, k={k}")
    if k > n:
        raise DomainError(f"log_binomial needs k <= n, got n={n}, k={k}")
    j = min(k, n - k)
    if j == 0:
        return 0.0
    if j <= DIRECT_BINOMIAL_LIMIT:
        top = np.log(np.arange(n - j + 1, n + 1, dtype=np.float64))
        bottom = np.log(np.arange(1, j + 1, dtype=np.float64))
        return float(np.sum(top - bottom))
    return float(gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0))


def poisson_pmf_log(E: float, n: Union[int, np.ndarray]) -> Union[LogProb, np.ndarray]:
    """
    ln(e^{-E} E^n / n!). Vectorised over n. E = 0 gives 0 at n = 0 and -inf
    elsewhere.
    """
    if not np.isfinite(E) or E < 0:
        raise DomainError(f"mean photon number must be finite and >= 0, got {E}")
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise DomainError("photon numbers must be nonnegative")
    out = xlogy(n_arr, E) - E - gammaln(n_arr + 1.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


def log_sum(log_values: Sequence[float]) -> LogProb:
    """ln(sum exp(v)) with max-factoring; empty input is ln 0 = -inf."""
    arr = np.asarray(log_values, dtype=np.float64)
    if arr.size == 0:
        return -np.inf
    return float(logsumexp(arr))


def to_linear(log_value: LogProb) -> float:
    return float(np.exp(log_value))


# ------------------------ Hermitian eigenproblems ------------------------


def as_hermitian(A: np.ndarray) -> np.ndarray:
    """
    Validate a square, conjugate-symmetric matrix and return it as complex128.
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DomainError(f"expected a nonempty square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))))
    asym = float(np.max(np.abs(A - A.conj().T)))
    if asym > HERMITIAN_ATOL * scale:
        raise DomainError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    return A


def eigh(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted DESCENDING and
    eigenvectors as orthonormal columns in the same order.
    """
    A = as_hermitian(A)
    if A.shape[0] > MAX_EIGH_DIM:
        raise DomainError(f"eigh supports dim <= {MAX_EIGH_DIM}, got {A.shape[0]}")

    # the exact Hermitian part; asymmetry below tolerance is rounding noise
    H = 0.5 * (A + A.conj().T)
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as e:
        raise EigenSolverError(f"eigendecomposition did not converge: {e}") from e

    order = np.argsort(w)[::-1]
    w = w[order]
    V = V[:, order]

    norm = float(np.max(np.abs(w))) if w.size else 0.0
    residual = float(np.max(np.abs(H @ V - V * w))) if w.size else 0.0
    if residual > RESIDUAL_RTOL * max(norm, 1e-300) and residual > 0.0:
        raise EigenSolverError(f"eigen residual {residual:.3e} exceeds tolerance (norm {norm:.3e})")
    gram = V.conj().T @ V
    if float(np.max(np.abs(gram - np.eye(V.shape[1])))) > RESIDUAL_RTOL:
        raise EigenSolverError("eigenvectors are not orthonormal")
    return w, V


def eigvalsh_desc(A: np.ndarray) -> np.ndarray:
    """Eigenvalues only, descending."""
    w, _ = eigh(A)
    return w


def spectral_norm(A: np.ndarray) -> float:
    w = eigvalsh_desc(A)
    return float(np.max(np.abs(w)))


def trace_norm(A: np.ndarray) -> float:
    """Sum of |eigenvalues| of a Hermitian matrix."""
    w = eigvalsh_desc(A)
    return float(np.sum(np.abs(w)))


def projector(vectors: np.ndarray) -> np.ndarray:
    """Sum of |v><v| over the columns of `vectors`."""
    vectors = np.asarray(vectors, dtype=np.complex128)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    return vectors @ vectors.conj().T


def is_density(rho: np.ndarray, atol: float = 1e-10) -> bool:
    """Hermitian, PSD and trace one (all within atol)."""
    try:
        w = eigvalsh_desc(rho)
    except DomainError:
        return False
    return bool(w[-1] >= -atol and abs(float(np.real(np.trace(rho))) - 1.0) <= atol)


def is_unitary(U: np.ndarray, atol: float = 1e-12) -> bool:
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) <= atol)


# ------------------------ randomness ------------------------


def make_rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def spawn_rngs(seed: Optional[int], count: int) -> List[np.random.Generator]:
    """
    Child generators from SeedSequence(seed).spawn(count). Child i depends only
    on (seed, i), so shard/instance results are reproducible individually.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(c) for c in children]


def instance_rng(seed: Optional[int], index: int) -> np.random.Generator:
    """The generator spawn_rngs(seed, index + 1)[index] without building the rest."""
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.default_rng(ss)
