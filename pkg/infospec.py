#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Finite-dimensional checks of the information-spectrum machinery for
pure-state channels.

For a pure output |psi><psi|, an average state sigma and a threshold t:

  positive_part_projector   {|psi><psi| - t sigma > 0}; rank <= 1 because a
                            rank-one operator minus a PSD one has at most one
                            positive eigenvalue
  np_probabilities          alpha = <psi|(I - Phi)|psi>,  beta = Tr sigma Phi
  level_projector           B = {I - s sigma > 0}: eigenvalues of sigma below 1/s

and the inequalities that connect them (gentle measurement, projected
overlap, the averaged sandwich bound). Thresholds are the raw numbers
s = e^{a b} and t' = e^{a (b + delta)}; no asymptotic parametrisation is needed
at finite dimension.

run_sweep evaluates every property on seeded random instances. Instance i
draws from SeedSequence(seed, spawn_key=(i,)), so any failure can be rebuilt
from (seed, i) alone.
"""

import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group
from tqdm import tqdm

from numerics import (
    DomainError,
    eigh,
    instance_rng,
    projector,
    trace_norm,
)
from spectrum import ky_fan_check

# eigenvalues of |psi><psi| - t sigma at or below this (times max(1, t)) count as zero
POSITIVE_ATOL = 1e-12
CHECK_ATOL = 1e-10
MAX_DIM = 512

DEFAULT_DIMS = (2, 3, 4, 5, 6, 7, 8)
DEFAULT_RATIOS = (10.0, 100.0, 1e4)

PROPERTIES = (
    "rank",
    "beta_bound",
    "neyman_pearson",
    "gentle",
    "projected_overlap",
    "sandwich",
    "ky_fan",
)


# ------------------------ types ------------------------


@dataclass(frozen=True, eq=False)
class PureEnsemble:
    states: np.ndarray  # shape (count, dim), one unit vector per row
    prior: np.ndarray

    def __post_init__(self) -> None:
        states = np.asarray(self.states, dtype=np.complex128)
        prior = np.asarray(self.prior, dtype=np.float64)
        if states.ndim != 2 or states.shape[0] == 0:
            raise DomainError(f"states must be a nonempty (count, dim) array, got shape {states.shape}")
        if not (2 <= states.shape[1] <= MAX_DIM):
            raise DomainError(f"dim must lie in 2..{MAX_DIM}, got {states.shape[1]}")
        if prior.shape != (states.shape[0],):
            raise DomainError("prior needs one entry per state")
        if np.any(prior < 0) or abs(math.fsum(prior) - 1.0) > 1e-12:
            raise DomainError("prior must be a probability vector")
        norms = np.linalg.norm(states, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise DomainError("every state must be a unit vector")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "prior", prior)

    @property
    def dim(self) -> int:
        return int(self.states.shape[1])


@dataclass(frozen=True)
class TestThresholds:
    __test__ = False  # not a pytest class

    s: float
    t_prime: float

    def __post_init__(self) -> None:
        if not (self.s > 0 and self.t_prime > self.s):
            raise DomainError(f"thresholds need t' > s > 0, got s={self.s}, t'={self.t_prime}")


# ------------------------ operators ------------------------


def average_state(ens: PureEnsemble) -> np.ndarray:
    rho = (ens.states.T * ens.prior) @ ens.states.conj()
    return 0.5 * (rho + rho.conj().T)


def _unit(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-12:
        raise DomainError(f"psi must be a unit vector (norm {norm})")
    return psi


def _positive_spectrum(psi: np.ndarray, sigma: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
    if not t > 0:
        raise DomainError(f"threshold t must be > 0, got {t}")
    psi = _unit(psi)
    X = np.outer(psi, psi.conj()) - t * np.asarray(sigma, dtype=np.complex128)
    w, V = eigh(X)
    positive = w > POSITIVE_ATOL * max(1.0, t)
    return w[positive], V[:, positive]


def positive_part_vector(psi: np.ndarray, sigma: np.ndarray, t: float) -> Optional[np.ndarray]:
    """The unit vector spanning {|psi><psi| - t sigma > 0}, or None when that projector is 0."""
    w, V = _positive_spectrum(psi, sigma, t)
    if w.size == 0:
        return None
    return V[:, 0]


def positive_part_projector(psi: np.ndarray, sigma: np.ndarray, t: float) -> np.ndarray:
    _, V = _positive_spectrum(psi, sigma, t)
    dim = np.asarray(sigma).shape[0]
    if V.shape[1] == 0:
        return np.zeros((dim, dim), dtype=np.complex128)
    return projector(V)


def np_probabilities(psi: np.ndarray, sigma: np.ndarray, t: float) -> Tuple[float, float]:
    """(alpha, beta) of the Neyman-Pearson test at threshold t; beta <= 1/t."""
    psi = _unit(psi)
    Phi = positive_part_projector(psi, sigma, t)
    alpha = 1.0 - float(np.real(psi.conj() @ Phi @ psi))
    beta = float(np.real(np.trace(np.asarray(sigma) @ Phi)))
    return min(max(alpha, 0.0), 1.0), max(beta, 0.0)


def level_projector(sigma: np.ndarray, s: float) -> np.ndarray:
    """B = {I - s sigma > 0}; I - B covers the eigenvalues >= 1/s."""
    if not s > 0:
        raise DomainError(f"threshold s must be > 0, got {s}")
    w, V = eigh(sigma)
    return projector(V[:, w < 1.0 / s])


def level_weight(sigma: np.ndarray, s: float) -> float:
    """Tr sigma (I - B): weight of sigma on eigenvalues >= 1/s."""
    if not s > 0:
        raise DomainError(f"threshold s must be > 0, got {s}")
    w = eigh(sigma)[0]
    return math.fsum(w[w >= 1.0 / s])


# ------------------------ property checks ------------------------


@dataclass(frozen=True)
class RankReport:
    positive_eigenvalues: int
    holds: bool


def rank_check(psi: np.ndarray, sigma: np.ndarray, t: float) -> RankReport:
    w, _ = _positive_spectrum(psi, sigma, t)
    return RankReport(positive_eigenvalues=int(w.size), holds=w.size <= 1)


@dataclass(frozen=True)
class DominanceReport:
    optimum: float
    best_sampled: float
    holds: bool


def np_dominance_check(psi: np.ndarray, sigma: np.ndarray, t: float, tests: np.ndarray) -> DominanceReport:
    """
    (1 - alpha) - t beta >= Tr(w A) - t Tr(sigma A) for each test 0 <= A <= I in
    `tests` (shape (count, dim, dim)).
    """
    psi = _unit(psi)
    alpha, beta = np_probabilities(psi, sigma, t)
    optimum = (1.0 - alpha) - t * beta
    detect = np.real(np.einsum("i,kij,j->k", psi.conj(), tests, psi))
    false_alarm = np.real(np.einsum("ij,kji->k", np.asarray(sigma), tests))
    sampled = detect - t * false_alarm
    best = float(np.max(sampled)) if sampled.size else -np.inf
    return DominanceReport(optimum=optimum, best_sampled=best, holds=best <= optimum + CHECK_ATOL * max(1.0, t))


@dataclass(frozen=True)
class GentleReport:
    overlap: float
    trace_norm_gap: float
    bound: float
    holds: bool
    vacuous: bool = False


def gentle_overlap_check(psi: np.ndarray, sigma: np.ndarray, th: TestThresholds) -> GentleReport:
    """
    With phi the positive-part vector at t' and B the level projector at s:
    <phi|(I-B)|phi> <= s/t'  and  || |phi><phi| - B|phi><phi|B ||_1 <= 2 sqrt(<phi|(I-B)|phi>).
    """
    phi = positive_part_vector(psi, sigma, th.t_prime)
    if phi is None:
        return GentleReport(0.0, 0.0, 0.0, True, vacuous=True)
    B = level_projector(sigma, th.s)
    dim = B.shape[0]
    overlap = max(float(np.real(phi.conj() @ (np.eye(dim) - B) @ phi)), 0.0)
    rho_phi = np.outer(phi, phi.conj())
    gap = trace_norm(rho_phi - B @ rho_phi @ B)
    bound = 2.0 * math.sqrt(overlap)
    holds = overlap <= th.s / th.t_prime + CHECK_ATOL and gap <= bound + CHECK_ATOL
    return GentleReport(overlap, gap, bound, holds)


@dataclass(frozen=True)
class SandwichReport:
    lhs: float
    rhs: float
    slack: float
    holds: bool


def sandwich_check(ens: PureEnsemble, th: TestThresholds) -> SandwichReport:
    """
    sum_x P(x) alpha_x(t') >= Tr sigma{sigma >= 1/s} - 2 sqrt(s/t').
    """
    sigma = average_state(ens)
    alphas = [np_probabilities(psi, sigma, th.t_prime)[0] for psi in ens.states]
    lhs = math.fsum(p * a for p, a in zip(ens.prior, alphas))
    rhs = level_weight(sigma, th.s) - 2.0 * math.sqrt(th.s / th.t_prime)
    slack = lhs - rhs
    return SandwichReport(lhs=lhs, rhs=rhs, slack=slack, holds=slack >= -CHECK_ATOL)


@dataclass(frozen=True)
class ProjectedOverlapReport:
    value: float
    bound: float
    holds: bool
    vacuous: bool = False


def projected_overlap_check(psi: np.ndarray, sigma: np.ndarray, s: float) -> ProjectedOverlapReport:
    """u = B psi / ||B psi||  =>  <u|sigma|u> <= 1/s."""
    psi = _unit(psi)
    B = level_projector(sigma, s)
    v = B @ psi
    norm = float(np.linalg.norm(v))
    if norm <= 1e-12:
        return ProjectedOverlapReport(0.0, 1.0 / s, True, vacuous=True)
    u = v / norm
    value = float(np.real(u.conj() @ np.asarray(sigma) @ u))
    return ProjectedOverlapReport(value, 1.0 / s, value <= 1.0 / s + CHECK_ATOL)


# ------------------------ random instances ------------------------


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_pure_ensemble(dim: int, size: int, rng: np.random.Generator) -> PureEnsemble:
    states = np.stack([random_pure_state(dim, rng) for _ in range(size)])
    prior = rng.dirichlet(np.ones(size))
    prior = prior / math.fsum(prior)
    return PureEnsemble(states=states, prior=prior)


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = G @ G.conj().T
    rho = rho / np.real(np.trace(rho))
    return 0.5 * (rho + rho.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)


def random_contractions(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """`count` random operators with 0 <= A <= I, shape (count, dim, dim)."""
    X = rng.normal(size=(count, dim, dim)) + 1j * rng.normal(size=(count, dim, dim))
    A = X @ np.conj(np.swapaxes(X, 1, 2))
    top = np.linalg.eigvalsh(A)[:, -1]
    scale = rng.uniform(0.0, 1.0, size=count) / top
    return A * scale[:, None, None]


# ------------------------ sweep ------------------------


@dataclass
class SweepReport:
    instances: int
    checks: Dict[str, int] = field(default_factory=dict)
    failures: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def total_checks(self) -> int:
        return sum(self.checks.values())

    def failures_for(self, name: str) -> int:
        return sum(1 for f in self.failures if f["property"] == name)


def _instance_payload(ens: PureEnsemble) -> Dict[str, Any]:
    return {
        "states_real": ens.states.real.tolist(),
        "states_imag": ens.states.imag.tolist(),
        "prior": ens.prior.tolist(),
    }


def check_instance(
    index: int,
    seed: Optional[int],
    dims: Sequence[int] = DEFAULT_DIMS,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    np_tests: int = 200,
) -> Tuple[Dict[str, int], List[Dict[str, Any]]]:
    """
    Every property on instance `index`. Returns (checks per property, failures).
    """
    rng = instance_rng(seed, index)
    dim = int(dims[index % len(dims)])
    size = int(rng.integers(1, dim + 2))
    ens = random_pure_ensemble(dim, size, rng)
    sigma = average_state(ens)

    # 1/s somewhere across (and a little beyond) the spectrum of sigma
    w = eigh(sigma)[0]
    level = rng.uniform(0.5 * max(w[-1], 1e-6), 1.5 * w[0])
    s = 1.0 / level
    tests = random_contractions(dim, np_tests, rng)

    checks: Dict[str, int] = dict.fromkeys(PROPERTIES, 0)
    failures: List[Dict[str, Any]] = []

    def record(name: str, ok: bool, **details: Any) -> None:
        checks[name] += 1
        if not ok:
            failures.append({"instance": index, "seed": seed, "dim": dim, "property": name,
                             "details": details, **_instance_payload(ens)})

    for ratio in ratios:
        th = TestThresholds(s=s, t_prime=ratio * s)
        for x, psi in enumerate(ens.states):
            rank = rank_check(psi, sigma, th.t_prime)
            record("rank", rank.holds, state=x, t=th.t_prime, positive=rank.positive_eigenvalues)

            _, beta = np_probabilities(psi, sigma, th.t_prime)
            record("beta_bound", beta <= 1.0 / th.t_prime + CHECK_ATOL, state=x, t=th.t_prime, beta=beta)

            gentle = gentle_overlap_check(psi, sigma, th)
            record("gentle", gentle.holds, state=x, s=th.s, t_prime=th.t_prime,
                   overlap=gentle.overlap, gap=gentle.trace_norm_gap, bound=gentle.bound)

            proj = projected_overlap_check(psi, sigma, th.s)
            record("projected_overlap", proj.holds, state=x, s=th.s, value=proj.value)

        dom = np_dominance_check(ens.states[0], sigma, th.t_prime, tests)
        record("neyman_pearson", dom.holds, t=th.t_prime, optimum=dom.optimum, best=dom.best_sampled)

        sw = sandwich_check(ens, th)
        record("sandwich", sw.holds, s=th.s, t_prime=th.t_prime, lhs=sw.lhs, rhs=sw.rhs)

    for _ in range(2):
        rho = random_density(dim, rng)
        U = random_unitary(dim, rng)
        t = float(rng.uniform())
        k = int(rng.integers(1, dim + 1))
        kf = ky_fan_check(rho, U, t, k)
        record("ky_fan", kf.holds, t=t, k=k, lhs=kf.lhs, rhs=kf.rhs)

    return checks, failures


def run_sweep(
    instances: int = 500,
    dims: Sequence[int] = DEFAULT_DIMS,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seed: Optional[int] = 0,
    np_tests: int = 200,
    workers: int = 1,
    progress: bool = False,
) -> SweepReport:
    if instances < 1:
        raise DomainError(f"instances must be >= 1, got {instances}")
    if any(d < 2 or d > MAX_DIM for d in dims):
        raise DomainError(f"dims must lie in 2..{MAX_DIM}")
    if any(r <= 1 for r in ratios):
        raise DomainError("every t'/s ratio must exceed 1")

    results: List[Optional[Tuple[Dict[str, int], List[Dict[str, Any]]]]] = [None] * instances
    pbar = tqdm(total=instances, unit="instance", desc="infospec sweep", disable=not progress)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
        futures = {
            ex.submit(check_instance, i, seed, dims, ratios, np_tests): i for i in range(instances)
        }
        for fut in as_completed(futures):
            results[futures[fut]] = fut.result()
            pbar.update(1)
    pbar.close()

    report = SweepReport(instances=instances, checks=dict.fromkeys(PROPERTIES, 0))
    for checks, failures in results:
        for name, count in checks.items():
            report.checks[name] += count
        report.failures.extend(failures)
    return report
