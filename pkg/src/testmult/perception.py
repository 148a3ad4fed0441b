"""Perceived death risk from reported data, and the activity it induces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def case_fatality_rate(deaths: float, cases: float) -> float:
    """Reported deaths over reported cases; 0 before the first detected case."""
    if deaths > cases:
        raise ValueError(f"deaths ({deaths}) exceed cases ({cases})")
    return deaths / cases if cases > 0 else 0.0


def perceived_infection_risk(beta: float, i_reported: float, population: float) -> float:
    if population <= 0:
        raise ValueError("alive population must be positive")
    return beta * i_reported / population


def perceived_death_risk(cfr: float, ir: float) -> float:
    if cfr < 0 or ir < 0:
        raise ValueError("perceived lethality and infection risk must be >= 0")
    return cfr * ir


def alternative_lethality(cfr: float, phi_true: float, t: int, horizon: int) -> float:
    """Blend of the CFR and the true IFR, with weight t/T on the truth."""
    if not 0 <= t <= horizon:
        raise ValueError(f"day {t} outside [0, {horizon}]")
    lam = t / horizon
    if lam == 0.0:
        return cfr
    if lam == 1.0:
        return phi_true
    return (1.0 - lam) * cfr + lam * phi_true


def ascertainment_adjusted_actives(deaths: float, cases: float, i_reported: float, lethality: float) -> tuple[float, float, float]:
    """Return ``(estimated total cases, ascertainment bias, estimated actives)``.

    The bias defaults to 1 when nothing has been detected or nobody has died.
    """
    if cases <= 0 or deaths <= 0 or lethality <= 0:
        return float(cases), 1.0, float(i_reported)
    c_hat = deaths / lethality
    bias = c_hat / cases
    return c_hat, bias, i_reported * bias


def fear_factor(chi: float | np.ndarray, eps: float) -> float | np.ndarray:
    """(1 + chi) ** -eps; the activity share kept by a non-isolated, non-severe agent."""
    return (1.0 + chi) ** -eps


FREE, ISOLATED, SEVERE, DEAD = "free", "isolated", "severe", "dead"


def labor_supply(status: str, chi: float, n0: float, eps_n: float, theta: float) -> float:
    """Labor of one agent; ``status`` is one of free / isolated / severe / dead.

    Leisure follows the same rule with (l0, eps_l), so :func:`leisure` is an alias.
    """
    if chi < 0:
        raise ValueError("perceived risk must be >= 0")
    if status == FREE:
        return n0 * fear_factor(chi, eps_n)
    if status == ISOLATED:
        return (1.0 - theta) * n0
    if status in (SEVERE, DEAD):
        return 0.0
    raise ValueError(f"unknown status {status!r}")


leisure = labor_supply


def contact_rate(avg_labor: float, avg_leisure: float, pi: float) -> float:
    return pi * avg_labor + (1.0 - pi) * avg_leisure


def endogenous_contact_matrix(group_activity: np.ndarray, population_activity: float, rho0: np.ndarray) -> np.ndarray:
    """Scale within-group contacts by own activity and cross-group contacts by population activity.

    ``group_activity[g]`` is ``pi * Nbar_g + (1 - pi) * Lbar_g``.
    """
    rho0 = np.asarray(rho0, dtype=float)
    g = len(group_activity)
    scale = np.full((g, g), float(population_activity))
    scale[np.diag_indices(g)] = group_activity
    return rho0 * scale


@dataclass(frozen=True)
class PerceptionState:
    chi: np.ndarray
    cfr: float
    group_cfr: np.ndarray
    ir: float
    lethality: float
    group_lethality: np.ndarray
    c_hat: float
    bias: float
    i_hat: float


def form_perceptions(
    reported: np.ndarray,
    population: float,
    beta: float,
    *,
    beliefs: str = "testing-data",
    info_release: str = "aggregate",
    phi: float = 0.0,
    group_phi: tuple[float, ...] = (0.0,),
    t: int = 0,
    horizon: int = 1,
) -> PerceptionState:
    """Perceived death risk per group from reported data.

    ``reported`` has one row per group with columns (cases, active, deaths).
    Perceived infection risk is shared across groups; only the lethality
    estimate can be group-specific (disaggregated data release).
    """
    reported = np.asarray(reported)
    n_groups = reported.shape[0]
    cases, active, deaths = (float(x) for x in reported.sum(axis=0))
    cfr = case_fatality_rate(deaths, cases)
    group_cfr = np.array([case_fatality_rate(r[2], r[0]) for r in reported])
    if info_release == "aggregate" or n_groups == 1:
        group_cfr_used = np.full(n_groups, cfr)
        truth = np.full(n_groups, phi)
    else:
        group_cfr_used = group_cfr
        truth = np.asarray(group_phi, dtype=float)

    if beliefs == "exogenous-learning":
        lethality = alternative_lethality(cfr, phi, t, horizon)
        group_leth = np.array([alternative_lethality(c, f, t, horizon) for c, f in zip(group_cfr_used, truth)])
        c_hat, bias, i_hat = ascertainment_adjusted_actives(deaths, cases, active, lethality)
    else:
        lethality = cfr
        group_leth = group_cfr_used
        c_hat, bias, i_hat = cases, 1.0, active

    ir = perceived_infection_risk(beta, i_hat, population)
    chi = group_leth * ir
    return PerceptionState(
        chi=chi, cfr=cfr, group_cfr=group_cfr, ir=ir, lethality=lethality,
        group_lethality=group_leth, c_hat=c_hat, bias=bias, i_hat=i_hat,
    )
