#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Capacities under a photon budget, all in nats.

  holevo_capacity(E)                 C(E) = (E+1)ln(E+1) - E ln E
  period_capacity(cfg)               K C(E/K)  (budget E shared by K pulses)
  period_capacity_expansion(cfg)     E ln K + E - E ln E + E^2/(2K)
  gaussian_capacity(E, V)            1/2 ln(1 + E/V)
  gaussian_period_capacity(cfg)      K/2 ln(1 + E/(KV))  <= E/(2V)
  gaussian_period_capacity_expansion E/(2V) - E^2/(4V^2 K)

The coherent-state side grows like E ln K without bound; the Gaussian side
saturates at E/(2V).
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List

import numpy as np
from scipy.special import xlogy

from numerics import DomainError


def check_energy(E: float) -> float:
    if E is None or not math.isfinite(E) or E < 0:
        raise DomainError(f"energy budget must be finite and >= 0, got {E}")
    return float(E)


@dataclass(frozen=True)
class PeriodConfig:
    E: float
    K: int = 1
    V: float = 1.0

    def __post_init__(self) -> None:
        check_energy(self.E)
        if int(self.K) != self.K or self.K < 1:
            raise DomainError(f"K must be a positive integer, got {self.K}")
        if not math.isfinite(self.V) or self.V <= 0:
            raise DomainError(f"V must be > 0, got {self.V}")


def holevo_capacity(E: float) -> float:
    E = check_energy(E)
    # xlogy(0, 0) == 0 gives the continuous extension at E = 0
    return float((E + 1.0) * np.log1p(E) - xlogy(E, E))


def period_capacity(cfg: PeriodConfig) -> float:
    """
    K * C(E/K), evaluated as (E+K) log1p(E/K) - E ln(E/K) so large K keeps
    its digits.
    """
    E, K = cfg.E, float(cfg.K)
    if E == 0:
        return 0.0
    return float((E + K) * np.log1p(E / K) - E * math.log(E / K))


def period_capacity_expansion(cfg: PeriodConfig) -> float:
    E, K = cfg.E, float(cfg.K)
    if E == 0:
        raise DomainError("the large-K expansion has an E ln E term; use period_capacity at E = 0")
    return E * math.log(K) + E - E * math.log(E) + E * E / (2.0 * K)


def gaussian_capacity(E: float, V: float) -> float:
    E = check_energy(E)
    if not math.isfinite(V) or V <= 0:
        raise DomainError(f"noise variance must be > 0, got {V}")
    return 0.5 * math.log1p(E / V)


def gaussian_period_capacity(cfg: PeriodConfig) -> float:
    K = float(cfg.K)
    return 0.5 * K * math.log1p(cfg.E / (K * cfg.V))


def gaussian_period_capacity_expansion(cfg: PeriodConfig) -> float:
    E, K, V = cfg.E, float(cfg.K), cfg.V
    return E / (2.0 * V) - E * E / (4.0 * V * V * K)


def gaussian_ceiling(E: float, V: float) -> float:
    return check_energy(E) / (2.0 * V)


def capacity_row(cfg: PeriodConfig) -> Dict[str, float]:
    row: Dict[str, float] = {
        "E": cfg.E,
        "K": cfg.K,
        "V": cfg.V,
        "holevo_per_pulse": holevo_capacity(cfg.E / cfg.K),
        "period_capacity": period_capacity(cfg),
        "period_expansion": period_capacity_expansion(cfg) if cfg.E > 0 else float("nan"),
        "gaussian_period_capacity": gaussian_period_capacity(cfg),
        "gaussian_expansion": gaussian_period_capacity_expansion(cfg),
        "gaussian_ceiling": gaussian_ceiling(cfg.E, cfg.V),
    }
    return row


def capacity_curve(E: float, V: float, K_values: Iterable[int]) -> List[Dict[str, float]]:
    return [capacity_row(PeriodConfig(E=E, K=int(K), V=V)) for K in K_values]
