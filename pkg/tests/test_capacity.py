"""Capacities under a shared photon budget and the Gaussian contrast."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capacity import (
    PeriodConfig,
    capacity_curve,
    capacity_row,
    gaussian_capacity,
    gaussian_ceiling,
    gaussian_period_capacity,
    gaussian_period_capacity_expansion,
    holevo_capacity,
    period_capacity,
    period_capacity_expansion,
)
from numerics import DomainError

K_GRID = sorted({int(round(k)) for k in np.geomspace(1, 10 ** 6, 13)})


class TestHolevoCapacity:

    def test_one_photon(self):
        np.testing.assert_allclose(holevo_capacity(1.0), 2.0 * math.log(2.0), rtol=1e-15)

    def test_vacuum(self):
        assert holevo_capacity(0.0) == 0.0

    def test_increasing_and_concave_on_uniform_grid(self):
        g = np.array([holevo_capacity(float(E)) for E in np.linspace(0.0, 50.0, 501)])
        assert np.all(np.diff(g) > 0)
        assert np.all(np.diff(g, 2) < 0)

    def test_slopes_decrease_on_log_grid(self):
        E = np.geomspace(1e-3, 1e4, 200)
        g = np.array([holevo_capacity(float(x)) for x in E])
        slopes = np.diff(g) / np.diff(E)
        assert np.all(slopes > 0)
        assert np.all(np.diff(slopes) < 0)

    @pytest.mark.parametrize("E", [-0.1, float("nan"), float("inf")])
    def test_domain(self, E):
        with pytest.raises(DomainError):
            holevo_capacity(E)


class TestPeriodCapacity:

    def test_hundred_pulses(self):
        cfg = PeriodConfig(E=1.0, K=100)
        np.testing.assert_allclose(period_capacity(cfg), 5.610154, atol=1e-6)
        np.testing.assert_allclose(period_capacity_expansion(cfg), 5.610170, atol=1e-6)
        np.testing.assert_allclose(period_capacity_expansion(cfg), period_capacity(cfg), rtol=1e-4)

    def test_single_pulse_is_holevo(self):
        np.testing.assert_allclose(period_capacity(PeriodConfig(E=2.5, K=1)), holevo_capacity(2.5), rtol=1e-14)

    def test_zero_energy(self):
        assert period_capacity(PeriodConfig(E=0.0, K=10)) == 0.0
        with pytest.raises(DomainError):
            period_capacity_expansion(PeriodConfig(E=0.0, K=10))

    @pytest.mark.parametrize("K", [10 ** 3, 10 ** 4, 10 ** 5])
    def test_expansion_error_is_second_order(self, K):
        def err(k):
            cfg = PeriodConfig(E=1.0, K=k)
            return abs(period_capacity(cfg) - period_capacity_expansion(cfg))

        assert 3.9 < err(K) / err(2 * K) < 4.1

    @given(
        E=st.floats(min_value=1e-3, max_value=50.0),
        K=st.integers(min_value=1, max_value=10 ** 6),
    )
    @settings(max_examples=200, deadline=None)
    def test_more_pulses_never_hurt(self, E, K):
        assert period_capacity(PeriodConfig(E=E, K=K + 1)) >= period_capacity(PeriodConfig(E=E, K=K))

    @pytest.mark.parametrize(
        "kwargs",
        [dict(E=-1.0), dict(E=1.0, K=0), dict(E=1.0, K=2.5), dict(E=1.0, V=0.0), dict(E=float("nan"))],
    )
    def test_config_domain(self, kwargs):
        with pytest.raises(DomainError):
            PeriodConfig(**kwargs)


class TestGaussianContrast:

    @pytest.mark.parametrize("E", [0.1, 0.5, 1.0, 2.0, 5.0, 10.0])
    @pytest.mark.parametrize("V", [0.5, 1.0, 2.0])
    def test_below_ceiling_and_monotone(self, E, V):
        values = [gaussian_period_capacity(PeriodConfig(E=E, K=K, V=V)) for K in K_GRID]
        assert all(v < gaussian_ceiling(E, V) for v in values)
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_single_pulse(self):
        np.testing.assert_allclose(
            gaussian_period_capacity(PeriodConfig(E=3.0, K=1, V=2.0)), gaussian_capacity(3.0, 2.0), rtol=1e-15
        )

    def test_expansion(self):
        cfg = PeriodConfig(E=1.0, K=10 ** 4, V=1.0)
        gap = abs(gaussian_period_capacity(cfg) - gaussian_period_capacity_expansion(cfg))
        assert gap < 1e-8

    def test_coherent_side_is_unbounded(self):
        rows = capacity_curve(1.0, 1.0, [10, 10 ** 3, 10 ** 6])
        assert rows[-1]["period_capacity"] > 10 * rows[-1]["gaussian_ceiling"]


class TestCapacityRow:

    def test_columns(self):
        row = capacity_row(PeriodConfig(E=1.0, K=4, V=1.0))
        assert set(row) == {
            "E", "K", "V", "holevo_per_pulse", "period_capacity", "period_expansion",
            "gaussian_period_capacity", "gaussian_expansion", "gaussian_ceiling",
        }
        np.testing.assert_allclose(row["period_capacity"], 4 * row["holevo_per_pulse"], rtol=1e-14)

    def test_zero_energy_expansion_is_nan(self):
        assert math.isnan(capacity_row(PeriodConfig(E=0.0, K=3))["period_expansion"])
