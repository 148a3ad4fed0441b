"""Production, tax revenue, health-care spending and deficits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ValidatedScenario
from .epidemic import confounding_daily_mean


@dataclass(frozen=True)
class FiscalDay:
    gdp: float
    revenue: float
    exp_testing: float
    exp_treatment: float
    deficit: float
    deficit_deviation: float

    @property
    def expenditure(self) -> float:
        return self.exp_testing + self.exp_treatment


def daily_gdp(labor_by_group: np.ndarray, productivity: np.ndarray) -> float:
    """Sum of productivity times labor, with per-group productivity."""
    return float(np.dot(np.asarray(productivity, dtype=float), np.asarray(labor_by_group, dtype=float)))


def daily_budget(gdp: float, tests: int, severe_count: int, c_t: float, c_s: float, tau: float,
                 baseline_deficit: float = 0.0) -> FiscalDay:
    exp_testing = c_t * tests
    exp_treatment = c_s * severe_count
    revenue = tau * gdp
    deficit = exp_testing + exp_treatment - revenue
    return FiscalDay(gdp, revenue, exp_testing, exp_treatment, deficit, deficit - baseline_deficit)


def group_productivity(scenario: ValidatedScenario) -> np.ndarray:
    cfg = scenario.config
    if cfg.groups is None:
        return np.array([cfg.economy.productivity])
    return np.array([g.productivity for g in cfg.groups.groups])


def steady_state_severe(scenario: ValidatedScenario) -> float:
    """Expected number of severe confounding cases on a pre-epidemic day."""
    conf = scenario.config.confounding
    daily = confounding_daily_mean(conf, scenario.config.p0, scenario.config.t_horizon)
    duration = conf.phi_f * conf.k_f + (1.0 - conf.phi_f) * conf.q_f
    return daily * conf.s_f * duration


def pre_epidemic(scenario: ValidatedScenario, group_size: np.ndarray) -> FiscalDay:
    """Steady state without the epidemic: everyone works n0, confounding cases at their mean."""
    cfg = scenario.config
    gov = cfg.government
    gdp = daily_gdp(np.asarray(group_size) * cfg.economy.n0, group_productivity(scenario))
    exp_treatment = gov.c_s * steady_state_severe(scenario)
    deficit = exp_treatment - gov.tau * gdp
    return FiscalDay(gdp, gov.tau * gdp, 0.0, exp_treatment, deficit, 0.0)
