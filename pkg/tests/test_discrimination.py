"""Covariant-measurement error bound, its SRM oracles and asymptotic regimes."""

import math

import numpy as np
import pytest

from discrimination import (
    Regime,
    RegimeTag,
    SymmetricEnsemble,
    asymptotic_error,
    balanced_coefficient,
    classify_regime,
    covariant_measurement_check,
    covariant_success,
    error_lower_bound,
    explicit_povm_check,
    min_energy_for_error,
    srm_success_oracle,
)
from numerics import ConditioningWarning, DomainError

P_GRID = [round(0.05 * i, 2) for i in range(21)]


class TestClosedForm:

    def test_two_codewords(self):
        ens = SymmetricEnsemble.from_energy(1.0, 2)
        expected = 0.5 * (1.0 + math.sqrt(1.0 - math.exp(-2.0)))
        np.testing.assert_allclose(covariant_success(ens), expected, rtol=1e-14)
        np.testing.assert_allclose(covariant_success(ens), 0.9649368, atol=1e-7)
        np.testing.assert_allclose(error_lower_bound(1.0, 2), 1.0 - expected, rtol=1e-12)
        np.testing.assert_allclose(error_lower_bound(1.0, 2), 0.0350635, atol=1e-7)

    @pytest.mark.parametrize("M", [1, 2, 7, 1000])
    def test_zero_energy_is_guessing(self, M):
        np.testing.assert_allclose(error_lower_bound(0.0, M), 1.0 - 1.0 / M, atol=1e-15)

    def test_single_codeword_never_errs(self):
        assert error_lower_bound(3.0, 1) == 0.0

    def test_far_energy_dominant_tail_is_representable(self):
        err = error_lower_bound(300.0, 4)
        assert 0.0 < err < 1e-250
        np.testing.assert_allclose(err, 3.0 * math.exp(-600.0) / 4.0, rtol=1e-10)

    def test_bound_stays_below_vacuum_overlap(self):
        for E in (0.1, 1.0, 5.0):
            for M in (2, 10, 10 ** 6):
                assert error_lower_bound(E, M) < math.exp(-E)

    def test_real_M(self):
        assert error_lower_bound(1.0, math.exp(2.0)) > error_lower_bound(1.0, 7)

    @pytest.mark.parametrize("kwargs", [dict(M=0.5, p=0.1), dict(M=2, p=1.5), dict(M=float("inf"), p=0.1)])
    def test_domain(self, kwargs):
        with pytest.raises(DomainError):
            SymmetricEnsemble(**kwargs)
        with pytest.raises(DomainError):
            SymmetricEnsemble.from_energy(-1.0, 2)


class TestSquareRootOracle:

    @pytest.mark.filterwarnings("ignore::numerics.ConditioningWarning")
    def test_oracle_matches_closed_form(self):
        for M in range(2, 65):
            for p in P_GRID:
                ens = SymmetricEnsemble(M=M, p=p)
                assert abs(srm_success_oracle(ens) - covariant_success(ens)) <= 1e-10, (M, p)

    @pytest.mark.parametrize("M", [2, 5, 64])
    def test_oracle_warns_on_identical_states(self, M):
        with pytest.warns(ConditioningWarning, match="numerically singular"):
            success = srm_success_oracle(SymmetricEnsemble(M=M, p=1.0))
        np.testing.assert_allclose(success, 1.0 / M, rtol=1e-12)

    def test_oracle_is_quiet_on_distinct_states(self, recwarn):
        srm_success_oracle(SymmetricEnsemble(M=64, p=0.95))
        assert not [w for w in recwarn if issubclass(w.category, ConditioningWarning)]

    @pytest.mark.parametrize("M", [2, 3, 5, 8, 16, 32])
    def test_explicit_povm(self, M):
        for p in P_GRID[:-1]:
            report = explicit_povm_check(SymmetricEnsemble(M=M, p=p))
            assert not report.singular
            assert report.completeness_residual <= 1e-10
            assert report.holds, (M, p, report)

    def test_identical_states_fall_back_to_pseudo_inverse(self):
        with pytest.warns(ConditioningWarning):
            report = explicit_povm_check(SymmetricEnsemble(M=4, p=1.0))
        assert report.singular
        assert report.holds
        np.testing.assert_allclose(report.success_probability, 0.25, atol=1e-12)

    @pytest.mark.parametrize("M", [2, 3, 9, 20])
    def test_covariant_measurement(self, M):
        for p in P_GRID[:-1]:
            report = covariant_measurement_check(SymmetricEnsemble(M=M, p=p))
            assert report.holds, (M, p, report)

    def test_needs_integer_M(self):
        with pytest.raises(DomainError):
            srm_success_oracle(SymmetricEnsemble(M=2.5, p=0.3))
        with pytest.raises(DomainError):
            explicit_povm_check(SymmetricEnsemble(M=65, p=0.3))


class TestRegimes:

    def test_classification(self):
        assert classify_regime(1.0, 20.0).regime is Regime.RATE_DOMINANT
        assert classify_regime(30.0, 10.0).regime is Regime.ENERGY_DOMINANT
        tag = classify_regime(3.0, 3.0)
        assert tag.regime is Regime.BALANCED and tag.A == 0.0

    def test_energy_dominant(self):
        exact = error_lower_bound(30.0, math.exp(10.0))
        approx = asymptotic_error(30.0, 10.0, RegimeTag(Regime.ENERGY_DOMINANT))
        assert abs(approx - exact) / exact < 0.02

    def test_rate_dominant(self):
        exact = error_lower_bound(1.0, math.exp(20.0))
        approx = asymptotic_error(1.0, 20.0, RegimeTag(Regime.RATE_DOMINANT))
        assert abs(approx - exact) < 1e-6
        assert exact < math.exp(-1.0)

    def test_balanced_coefficient(self):
        assert abs(balanced_coefficient(0.0) - (3.0 - 2.0 * math.sqrt(2.0))) <= 1e-12
        x = math.exp(1.5)
        np.testing.assert_allclose(balanced_coefficient(1.5), 1.0 + 2.0 * x - 2.0 * math.sqrt(x * (1.0 + x)), rtol=1e-9)

    def test_balanced_example(self):
        approx = asymptotic_error(1.0, 1.0, RegimeTag(Regime.BALANCED, 0.0))
        np.testing.assert_allclose(approx, (3.0 - 2.0 * math.sqrt(2.0)) * math.exp(-1.0), rtol=1e-12)
        np.testing.assert_allclose(approx, 0.063118, atol=1e-6)

    def test_balanced_needs_A(self):
        with pytest.raises(DomainError):
            RegimeTag(Regime.BALANCED)


class TestMinEnergyForError:

    @pytest.mark.parametrize("M", [2, 16, 1024])
    @pytest.mark.parametrize("target", [0.3, 1e-3, 1e-8])
    def test_inverse(self, M, target):
        E = min_energy_for_error(M, target)
        assert error_lower_bound(E, M) <= target
        assert error_lower_bound(max(E - 1e-8, 0.0), M) > target or E == 0.0

    def test_trivial_target(self):
        assert min_energy_for_error(4, 0.75) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            min_energy_for_error(2, 0.0)
