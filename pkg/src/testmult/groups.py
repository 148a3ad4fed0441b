"""Young/old extension: group infection risks, information release, group outputs."""

from __future__ import annotations

import numpy as np

from .perception import PerceptionState, endogenous_contact_matrix, form_perceptions


def meeting_probabilities(i_star: np.ndarray, i_detected: np.ndarray, population: np.ndarray, theta: float) -> np.ndarray:
    """Per group, the chance that a contact is a non-isolated infected agent."""
    i_star = np.asarray(i_star, dtype=float)
    isolated = theta * np.asarray(i_detected, dtype=float)
    denom = np.asarray(population, dtype=float) - isolated
    num = i_star - isolated
    out = np.zeros_like(num)
    for g in range(len(num)):
        if denom[g] > 0:
            out[g] = num[g] / denom[g]
        elif num[g] > 0:
            raise ValueError(f"group {g}: no non-isolated population left to meet")
    return out


def group_infection_risk(group: int, i_star: np.ndarray, i_detected: np.ndarray, population: np.ndarray,
                         rho: np.ndarray, beta: float, theta: float) -> float:
    """Infection risk of a susceptible in ``group`` given lagged group states and contact matrix."""
    return float(group_infection_risks(i_star, i_detected, population, rho, beta, theta)[group])


def group_infection_risks(i_star, i_detected, population, rho, beta, theta) -> np.ndarray:
    f = meeting_probabilities(i_star, i_detected, population, theta)
    ir = beta * np.asarray(rho, dtype=float) @ f
    return np.clip(ir, 0.0, 1.0)


def scenario_perceptions(reported: np.ndarray, population: float, beta: float, info_release: str,
                         **kwargs) -> PerceptionState:
    """Group perceived death risks: shared CFR (aggregate) or group CFRs (disaggregated)."""
    return form_perceptions(reported, population, beta, info_release=info_release, **kwargs)


def group_gdp_and_contacts(labor: np.ndarray, leisure: np.ndarray, population: np.ndarray,
                           productivity: np.ndarray, rho0: np.ndarray, pi: float) -> dict[str, np.ndarray]:
    """Per-group production and the endogenous contact matrix from group activity totals."""
    labor = np.asarray(labor, dtype=float)
    leisure = np.asarray(leisure, dtype=float)
    population = np.asarray(population, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        avg_n = np.where(population > 0, labor / population, 0.0)
        avg_l = np.where(population > 0, leisure / population, 0.0)
    total = population.sum()
    pop_n = labor.sum() / total if total > 0 else 0.0
    pop_l = leisure.sum() / total if total > 0 else 0.0
    activity = pi * avg_n + (1.0 - pi) * avg_l
    pop_activity = pi * pop_n + (1.0 - pi) * pop_l
    return {
        "gdp": np.asarray(productivity, dtype=float) * labor,
        "avg_labor": avg_n,
        "avg_leisure": avg_l,
        "activity": activity,
        "pop_avg_labor": np.float64(pop_n),
        "pop_avg_leisure": np.float64(pop_l),
        "pop_activity": np.float64(pop_activity),
        "rho": endogenous_contact_matrix(activity, pop_activity, rho0),
    }
