"""Latent dynamics of the epidemic and the confounding disease at the agent level."""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from .config import ConfoundingDiseaseSpec, EpidemicDiseaseSpec, ValidatedScenario
from .kernels import NEVER
from .stochastic import binomial, geometric0, poisson, rounded_normal, sample_without_replacement, shifted_poisson, stream

SEVERE, MILD, ASYMPTOMATIC = 0, 1, 2


class Course(NamedTuple):
    """Pre-drawn epidemic course of one agent; lags are days since infection."""

    symptom: int
    death: bool
    p: int
    k: int
    q: int


def _lag(rng: np.random.Generator, mean: float, n: int, distribution: str) -> np.ndarray:
    if distribution == "geometric":
        return geometric0(rng, mean, n)
    return poisson(rng, mean, n)


def draw_epidemic_courses(
    rng: np.random.Generator,
    spec: EpidemicDiseaseSpec,
    n: int,
    phi_s: Optional[np.ndarray | float] = None,
) -> dict[str, np.ndarray]:
    """Vectorized :func:`schedule_epidemic_course` for ``n`` agents.

    ``phi_s`` may be an array to give each agent its own severe-case fatality
    risk (two-group model).  Lags are independent of symptom type and outcome,
    except that ``q_tilde_severe`` (when set) replaces ``q_tilde`` for severe cases.
    """
    u = rng.random(n)
    symptom = np.where(u < spec.s, SEVERE, np.where(u < spec.s + spec.m, MILD, ASYMPTOMATIC)).astype(np.int8)
    phi_s = spec.phi_s if phi_s is None else phi_s
    fatality = np.select(
        [symptom == SEVERE, symptom == MILD], [np.broadcast_to(phi_s, (n,)), spec.phi_m], spec.phi_a
    )
    death = rng.random(n) < fatality
    p_lag = shifted_poisson(rng, spec.p - 1, n)
    k_tilde = _lag(rng, spec.k_tilde, n, spec.lag_distribution)
    q_tilde = _lag(rng, spec.q_tilde, n, spec.lag_distribution)
    if spec.q_tilde_severe is not None:
        q_sev = _lag(rng, spec.q_tilde_severe, n, spec.lag_distribution)
        q_tilde = np.where(symptom == SEVERE, q_sev, q_tilde)
    k = p_lag + k_tilde
    q = p_lag + q_tilde
    assert np.all(k >= p_lag) and np.all(q >= p_lag) and np.all(p_lag >= 1)
    return {
        "symptom": symptom,
        "death": death,
        "p": p_lag.astype(np.int32),
        "k": k.astype(np.int32),
        "q": q.astype(np.int32),
    }


def schedule_epidemic_course(rng: np.random.Generator, spec: EpidemicDiseaseSpec, phi_s: Optional[float] = None) -> Course:
    c = draw_epidemic_courses(rng, spec, 1, phi_s)
    return Course(int(c["symptom"][0]), bool(c["death"][0]), int(c["p"][0]), int(c["k"][0]), int(c["q"][0]))


def epidemic_indicators(t: int, infected_on: int, course: Course) -> dict[str, int]:
    """Closed-form indicator values of one agent at day ``t``.

    Direct transcription of the incubation / death / recovery / symptom
    recursions; used as an oracle for the vectorized kernels.
    """

    def c(day: int) -> int:
        return int(day >= infected_on)

    u = c(t) - c(t - course.p)
    d = int(course.death) * c(t - course.k)
    r = (1 - int(course.death)) * c(t - course.q)
    onset = c(t - course.p) - d - r
    s = int(course.symptom == SEVERE) * onset
    m = int(course.symptom == MILD) * onset
    a = int(course.symptom == ASYMPTOMATIC) * onset
    i = c(t) - r - d
    assert i == u + s + m + a
    return {"c": c(t), "u": u, "d": d, "r": r, "s": s, "m": m, "a": a, "i": i}


def confounding_indicators(t: int, infected_on: int, severe: bool, death: bool, k_f: int, q_f: int) -> dict[str, int]:
    def c(day: int) -> int:
        return int(day >= infected_on)

    d = int(death) * c(t - k_f)
    r = (1 - int(death)) * c(t - q_f)
    s = int(severe) * (c(t) - d - r)
    m = (1 - int(severe)) * (c(t) - d - r)
    return {"c": c(t), "d": d, "r": r, "s": s, "m": m, "i": s + m}


def true_infection_risk(beta: float, rho: float, i_star: float, i_detected: float, population: float, theta: float) -> float:
    """Daily probability that a susceptible agent catches the epidemic disease."""
    isolated = theta * i_detected
    if population - isolated <= 0:
        raise ValueError("no non-isolated population left to meet")
    if rho < 0 or not 0 <= isolated <= i_star + 1e-9:
        raise ValueError("inconsistent infection-risk inputs")
    ir = beta * rho * (i_star - isolated) / (population - isolated)
    return min(1.0, max(0.0, ir))


class Population:
    """Agent-level latent state of one replication.

    Every agent's epidemic course and confounding-disease flags are drawn once
    up front, so the fate an agent meets if infected does not depend on when
    (or in which testing scenario) the infection happens.
    """

    def __init__(self, scenario: ValidatedScenario, seed: int):
        cfg = scenario.config
        n = int(cfg.p0)
        self.scenario = scenario
        self.seed = seed
        self.n = n
        self.n_groups = scenario.n_groups
        self.group = np.zeros(n, dtype=np.int8)
        if cfg.groups is None:
            self.group_size = np.array([n], dtype=np.int64)
            phi_s: np.ndarray | float = cfg.epidemic.phi_s
        else:
            n_young = int(round(cfg.groups.groups[0].share * n))
            self.group[n_young:] = 1
            self.group_size = np.array([n_young, n - n_young], dtype=np.int64)
            phi_s = np.array([g.phi_s for g in cfg.groups.groups])[self.group]

        course = draw_epidemic_courses(stream(seed, "schedule", 0), cfg.epidemic, n, phi_s)
        self.symptom = course["symptom"]
        self.epi_death = course["death"]
        self.p_lag = course["p"]
        self.k_lag = course["k"]
        self.q_lag = course["q"]

        conf = cfg.confounding
        rng = stream(seed, "schedule", 1)
        self.conf_severe = rng.random(n) < conf.s_f
        self.conf_death = rng.random(n) < conf.phi_f
        self.k_f = int(conf.k_f)
        self.q_f = int(conf.q_f)

        self.epi_day = np.full(n, NEVER, dtype=np.int32)
        self.conf_day = np.full(n, NEVER, dtype=np.int32)
        self.detected = np.zeros(n, dtype=bool)
        self.state = np.zeros(n, dtype=np.int8)
        self.counts = np.zeros((self.n_groups, kernels.N_STATES), dtype=np.int64)
        self.det_counts = np.zeros((self.n_groups, kernels.N_STATES), dtype=np.int64)

    # -- daily progression -------------------------------------------------

    def advance(self, t: int) -> None:
        """Evaluate both diseases' indicators for every agent at day ``t``."""
        kernels.classify(
            t, self.group, self.epi_day, self.symptom, self.epi_death, self.p_lag, self.k_lag, self.q_lag,
            self.conf_day, self.conf_severe, self.conf_death, self.k_f, self.q_f, self.detected,
            self.state, self.counts, self.det_counts,
        )

    def never_infected(self, group: Optional[int] = None) -> np.ndarray:
        mask = (self.epi_day == NEVER) & (self.conf_day == NEVER)
        if group is not None and self.n_groups > 1:
            mask &= self.group == group
        return np.flatnonzero(mask)

    # -- infections --------------------------------------------------------

    def infect(self, ids: np.ndarray, day: int) -> None:
        assert np.all(self.epi_day[ids] == NEVER) and np.all(self.conf_day[ids] == NEVER)
        self.epi_day[ids] = day

    def infect_confounding(self, ids: np.ndarray, day: int) -> None:
        assert np.all(self.epi_day[ids] == NEVER) and np.all(self.conf_day[ids] == NEVER)
        self.conf_day[ids] = day


def draw_new_epidemic_infections(
    pop: Population,
    ir: float,
    rng: np.random.Generator,
    day: int,
    susceptible: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Binomial(|susceptible|, ir) new infections on ``day``, chosen uniformly."""
    if susceptible is None:
        susceptible = pop.never_infected()
    k = binomial(rng, len(susceptible), ir)
    ids = sample_without_replacement(rng, susceptible, k)
    pop.infect(ids, day)
    return ids


def confounding_daily_mean(spec: ConfoundingDiseaseSpec, p0: int, horizon: int) -> float:
    return spec.omega_f * p0 / horizon


def draw_confounding_infections(
    pop: Population,
    spec: ConfoundingDiseaseSpec,
    rng: np.random.Generator,
    day: int,
    p0: int,
    horizon: int,
) -> np.ndarray:
    """Exogenous stationary daily confounding cases among never-infected agents."""
    mean = confounding_daily_mean(spec, p0, horizon)
    count = rounded_normal(rng, mean, spec.sigma_f * mean)
    pool = pop.never_infected()
    ids = sample_without_replacement(rng, pool, min(count, len(pool)))
    pop.infect_confounding(ids, day)
    return ids
