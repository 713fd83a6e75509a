"""PPM code: exact error, Monte-Carlo agreement and consistency with the lower bound."""

import math

import numpy as np
import pytest

from discrimination import error_lower_bound
from numerics import DomainError
from ppm import (
    CONSISTENCY_E,
    CONSISTENCY_N,
    PpmCode,
    consistency_grid,
    consistency_with_bound,
    decoder_success_fock,
    exact_error,
    fock_truncation_tail,
    log_law_boundary_check,
    log_rate,
    simulate,
)


class TestExactError:

    @pytest.mark.parametrize(
        "E,expected", [(0.0, 1.0), (1.0, math.exp(-1.0)), (math.log(100.0), 0.01)]
    )
    def test_values(self, E, expected):
        np.testing.assert_allclose(exact_error(PpmCode(N=8, E=E)), expected, rtol=1e-14)

    def test_independent_of_slots(self):
        assert exact_error(PpmCode(N=2, E=1.3)) == exact_error(PpmCode(N=10 ** 6, E=1.3))

    @pytest.mark.parametrize("kwargs", [dict(N=0, E=1.0), dict(N=2.5, E=1.0), dict(N=2, E=-1.0)])
    def test_domain(self, kwargs):
        with pytest.raises(DomainError):
            PpmCode(**kwargs)


class TestFockDecoder:

    @pytest.mark.parametrize("E", [0.5, 1.0, 4.0])
    def test_matches_closed_form(self, E):
        code = PpmCode(N=4, E=E)
        n_cut = 40
        gap = (1.0 - exact_error(code)) - decoder_success_fock(code, n_cut)
        assert 0.0 <= gap + 1e-15
        assert gap <= fock_truncation_tail(code, n_cut) + 1e-15

    def test_short_truncation_loses_tail(self):
        code = PpmCode(N=4, E=3.0)
        gap = (1.0 - exact_error(code)) - decoder_success_fock(code, 2)
        np.testing.assert_allclose(gap, fock_truncation_tail(code, 2), rtol=1e-12)


class TestSimulation:

    def test_vacuum_always_fails(self):
        report = simulate(PpmCode(N=4, E=0.0), trials=1000, seed=1)
        assert report.empirical_error == 1.0
        assert report.deviation == 0.0

    @pytest.mark.parametrize("E", [1.0, 5.0])
    def test_within_four_sigma(self, E):
        report = simulate(PpmCode(N=16, E=E), trials=10 ** 6, seed=12345, shards=8, workers=4)
        assert report.trials == 10 ** 6
        assert report.deviation <= 4.0
        assert report.ci95[0] <= report.empirical_error <= report.ci95[1]

    def test_seed_and_shards_fix_the_result(self):
        code = PpmCode(N=3, E=1.0)
        a = simulate(code, trials=50_000, seed=99, shards=5, workers=1)
        b = simulate(code, trials=50_000, seed=99, shards=5, workers=5)
        assert a.errors == b.errors

    def test_domain(self):
        with pytest.raises(DomainError):
            simulate(PpmCode(N=2, E=1.0), trials=0, seed=1)
        with pytest.raises(DomainError):
            simulate(PpmCode(N=2, E=1.0), trials=10, seed=1, shards=0)


class TestConsistency:

    def test_two_slots(self):
        report = consistency_with_bound(PpmCode(N=2, E=1.0))
        np.testing.assert_allclose(report.achieved, math.exp(-1.0), rtol=1e-15)
        np.testing.assert_allclose(report.lower_bound, 0.0350635, atol=1e-7)
        assert report.holds and report.gap > 0.3

    def test_grid(self):
        reports = consistency_grid()
        assert len(reports) == len(CONSISTENCY_E) * len(CONSISTENCY_N)
        assert all(r.holds for r in reports)

    def test_bound_approaches_from_below(self):
        small = consistency_with_bound(PpmCode(N=2, E=1.0)).gap
        large = consistency_with_bound(PpmCode(N=10 ** 6, E=1.0)).gap
        assert 0.0 < large < small
        assert error_lower_bound(1.0, 10 ** 6) < math.exp(-1.0)

    def test_needs_two_slots(self):
        with pytest.raises(DomainError):
            consistency_with_bound(PpmCode(N=1, E=1.0))

    def test_log_rate(self):
        assert log_rate(PpmCode(N=16, E=1.0)) == 1.0
        with pytest.raises(DomainError):
            log_rate(PpmCode(N=1, E=1.0))

    @pytest.mark.parametrize("E", [0.5, 1.0, 3.0])
    def test_staircase_boundary(self, E):
        assert log_law_boundary_check(PpmCode(N=8, E=E))
