"""Information-spectrum inequalities at finite dimension."""

import math

import numpy as np
import pytest

from infospec import (
    PROPERTIES,
    PureEnsemble,
    TestThresholds,
    average_state,
    gentle_overlap_check,
    level_projector,
    level_weight,
    np_dominance_check,
    np_probabilities,
    positive_part_projector,
    projected_overlap_check,
    random_contractions,
    random_density,
    random_pure_ensemble,
    random_pure_state,
    rank_check,
    run_sweep,
    sandwich_check,
)
from numerics import DomainError


def _basis_ensemble(dim=2):
    return PureEnsemble(states=np.eye(dim), prior=np.full(dim, 1.0 / dim))


class TestTypes:

    def test_thresholds(self):
        TestThresholds(s=1.0, t_prime=2.0)
        with pytest.raises(DomainError):
            TestThresholds(s=2.0, t_prime=1.0)
        with pytest.raises(DomainError):
            TestThresholds(s=0.0, t_prime=1.0)

    def test_ensemble_validation(self):
        with pytest.raises(DomainError):
            PureEnsemble(states=np.array([[1.0, 1.0]]), prior=np.array([1.0]))
        with pytest.raises(DomainError):
            PureEnsemble(states=np.eye(2), prior=np.array([0.6, 0.6]))
        with pytest.raises(DomainError):
            PureEnsemble(states=np.eye(2), prior=np.array([1.0]))
        with pytest.raises(DomainError):
            PureEnsemble(states=np.array([[1.0]]), prior=np.array([1.0]))

    def test_average_state(self):
        sigma = average_state(_basis_ensemble(3))
        np.testing.assert_allclose(sigma, np.eye(3) / 3.0, atol=1e-15)


class TestPositivePart:

    def test_rank_at_most_one(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            dim = int(rng.integers(2, 17))
            psi = random_pure_state(dim, rng)
            sigma = random_density(dim, rng)
            t = float(10 ** rng.uniform(-2, 3))
            P = positive_part_projector(psi, sigma, t)
            assert np.trace(P).real <= 1.0 + 1e-10
            assert rank_check(psi, sigma, t).holds

    def test_rank_deficient_average(self):
        psi = random_pure_state(4, np.random.default_rng(1))
        sigma = np.outer(psi, psi.conj())
        report = rank_check(psi, sigma, 0.5)
        assert report.positive_eigenvalues == 1

    def test_tie_is_the_smaller_projector(self):
        psi = np.array([1.0, 0.0])
        sigma = np.diag([1.0, 0.0])
        assert np.allclose(positive_part_projector(psi, sigma, 1.0), 0.0)
        alpha, beta = np_probabilities(psi, sigma, 1.0)
        assert alpha == 1.0 and beta == 0.0

    def test_beta_below_inverse_threshold(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            dim = int(rng.integers(2, 9))
            psi = random_pure_state(dim, rng)
            sigma = random_density(dim, rng)
            t = float(10 ** rng.uniform(-1, 4))
            alpha, beta = np_probabilities(psi, sigma, t)
            assert 0.0 <= alpha <= 1.0
            assert beta <= 1.0 / t + 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            np_probabilities(np.array([1.0, 1.0]), np.eye(2) / 2, 1.0)
        with pytest.raises(DomainError):
            positive_part_projector(np.array([1.0, 0.0]), np.eye(2) / 2, 0.0)


class TestNeymanPearson:

    def test_dominates_random_tests(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            dim = int(rng.integers(2, 9))
            psi = random_pure_state(dim, rng)
            sigma = random_density(dim, rng)
            t = float(10 ** rng.uniform(-1, 3))
            tests = random_contractions(dim, 200, rng)
            report = np_dominance_check(psi, sigma, t, tests)
            assert report.holds, report

    def test_contractions_are_contractions(self):
        A = random_contractions(5, 50, np.random.default_rng(9))
        w = np.linalg.eigvalsh(A)
        assert w.min() >= -1e-12
        assert w.max() <= 1.0 + 1e-12

    def test_positive_part_attains_optimum(self):
        rng = np.random.default_rng(5)
        psi = random_pure_state(3, rng)
        sigma = random_density(3, rng)
        P = positive_part_projector(psi, sigma, 2.0)
        report = np_dominance_check(psi, sigma, 2.0, P[None, :, :])
        np.testing.assert_allclose(report.best_sampled, report.optimum, atol=1e-12)


class TestLevelProjector:

    def test_counts_small_eigenvalues(self):
        sigma = np.diag([0.7, 0.2, 0.1])
        B = level_projector(sigma, 4.0)
        np.testing.assert_allclose(B, np.diag([0.0, 1.0, 1.0]), atol=1e-15)
        np.testing.assert_allclose(level_weight(sigma, 4.0), 0.7, atol=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            level_projector(np.eye(2) / 2, -1.0)


class TestGentleOverlap:

    def test_vacuous_when_projector_is_zero(self):
        sigma = np.eye(2) / 2.0
        report = gentle_overlap_check(np.array([1.0, 0.0]), sigma, TestThresholds(s=1.9, t_prime=1000.0))
        assert report.vacuous and report.holds

    def test_random_instances(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            dim = int(rng.integers(2, 9))
            ens = random_pure_ensemble(dim, int(rng.integers(1, dim + 2)), rng)
            sigma = average_state(ens)
            s = float(10 ** rng.uniform(0, 1.5))
            th = TestThresholds(s=s, t_prime=s * float(rng.choice([10.0, 100.0, 1e4])))
            for psi in ens.states:
                report = gentle_overlap_check(psi, sigma, th)
                assert report.holds, report
                assert report.overlap <= th.s / th.t_prime + 1e-10


class TestProjectedOverlap:

    def test_maximally_mixed(self):
        report = projected_overlap_check(np.array([1.0, 0.0]), np.eye(2) / 2.0, 1.0)
        assert not report.vacuous
        np.testing.assert_allclose(report.value, 0.5, atol=1e-15)
        assert report.holds

    def test_vacuous(self):
        report = projected_overlap_check(np.array([1.0, 0.0]), np.diag([1.0, 0.0]), 2.0)
        assert report.vacuous and report.holds

    def test_random_instances(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            dim = int(rng.integers(2, 9))
            sigma = random_density(dim, rng)
            psi = random_pure_state(dim, rng)
            s = float(10 ** rng.uniform(0, 2))
            assert projected_overlap_check(psi, sigma, s).holds


class TestSandwich:

    def test_below_every_level(self):
        # all eigenvalues of sigma (1/2) are below 1/s, so the weight term is 0
        report = sandwich_check(_basis_ensemble(), TestThresholds(s=1.9, t_prime=1000.0))
        np.testing.assert_allclose(report.rhs, -2.0 * math.sqrt(0.0019), rtol=1e-12)
        assert report.holds

    def test_above_every_level(self):
        report = sandwich_check(_basis_ensemble(), TestThresholds(s=2.5, t_prime=2500.0))
        np.testing.assert_allclose(report.rhs, 1.0 - 2.0 * math.sqrt(0.001), rtol=1e-12)
        np.testing.assert_allclose(report.lhs, 1.0, atol=1e-15)
        assert report.holds

    def test_random_instances(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            dim = int(rng.integers(2, 9))
            ens = random_pure_ensemble(dim, int(rng.integers(1, dim + 2)), rng)
            s = float(10 ** rng.uniform(0, 1.5))
            for ratio in (10.0, 100.0, 1e4):
                assert sandwich_check(ens, TestThresholds(s=s, t_prime=ratio * s)).holds


class TestSweep:

    def test_small_sweep_is_clean_and_reproducible(self):
        a = run_sweep(instances=21, seed=7, np_tests=50, workers=1)
        b = run_sweep(instances=21, seed=7, np_tests=50, workers=4)
        assert a.ok and b.ok
        assert a.checks == b.checks
        assert set(a.checks) == set(PROPERTIES)
        assert all(count > 0 for count in a.checks.values())
        assert a.checks["ky_fan"] == 42

    def test_full_sweep(self):
        report = run_sweep(instances=500, seed=2024, workers=4)
        assert report.ok, report.failures[:3]
        assert report.total_checks > 500 * len(PROPERTIES)

    def test_domain(self):
        with pytest.raises(DomainError):
            run_sweep(instances=0)
        with pytest.raises(DomainError):
            run_sweep(instances=1, ratios=(0.5,))
        with pytest.raises(DomainError):
            run_sweep(instances=1, dims=(1,))
