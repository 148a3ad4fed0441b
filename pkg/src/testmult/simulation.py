"""Daily loop, replications, and Monte Carlo ensembles."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__, kernels
from .config import ScenarioConfig, ValidatedScenario, scenario_hash, validate
from .economy import daily_budget, group_productivity, pre_epidemic
from .epidemic import Population, draw_confounding_infections, draw_new_epidemic_infections
from .groups import group_gdp_and_contacts, group_infection_risks
from .kernels import (ASYMPTOMATIC, DEAD, F_DEAD, F_MILD, F_RECOVERED, F_SEVERE, INCUBATING, MILD, RECOVERED,
                      SEVERE, SUSCEPTIBLE)
from .perception import fear_factor, form_perceptions
from .stochastic import STREAMS, stream
from .testing import DetectionLedger, administer_and_resolve, reported_counts, select_nonsevere_tests, select_severe_tests

DAY_ORDER = "progress>resolve>perceive>activity>gdp>test>budget>infect/v1"
GROUP_SUFFIX = ("_y", "_o")


class SimulationInvariantError(RuntimeError):
    """A conservation or ordering invariant failed during a replication."""


@dataclass
class ReplicationOutput:
    seed: int
    series: dict[str, np.ndarray]
    cumulative: dict[str, float]

    def to_frame(self):
        import pandas as pd

        return pd.DataFrame(self.series)


def _as_validated(scenario: ScenarioConfig | ValidatedScenario) -> ValidatedScenario:
    return scenario if isinstance(scenario, ValidatedScenario) else validate(scenario)


class World:
    """One replication's single-owner state.

    Day 0 holds the initial infections; :meth:`step_day` then simulates days
    ``1..T``.  Infections appearing on day ``t + 1`` are drawn at the end of
    day ``t`` from that day's latent and detected actives.
    """

    def __init__(self, scenario: ScenarioConfig | ValidatedScenario, seed: Optional[int] = None):
        self.scenario = _as_validated(scenario)
        cfg = self.scenario.config
        self.cfg = cfg
        self.seed = cfg.seed if seed is None else int(seed)
        self.pop = Population(self.scenario, self.seed)
        self.ledger = DetectionLedger(self.pop, int(cfg.government.d))
        self.n_groups = self.pop.n_groups
        self.rho0 = np.array([[1.0]]) if cfg.groups is None else np.array(cfg.groups.rho0, dtype=float)
        self.productivity = group_productivity(self.scenario)
        self.pre = pre_epidemic(self.scenario, self.pop.group_size)
        self.beta_perceived = cfg.epidemic.beta if cfg.perceived_beta is None else cfg.perceived_beta
        self.t = 0
        self.records: list[dict[str, float]] = []
        self._prev: Optional[dict[str, int]] = None
        self.cum_infected = 0
        self.cum_confounding = 0
        self._initialize()

    # -- setup -------------------------------------------------------------

    def _initialize(self) -> None:
        cfg = self.cfg
        rng = stream(self.seed, "initial", 0)
        if cfg.groups is None:
            c0 = [int(cfg.epidemic.c0_star)]
        else:
            c0 = [int(g.c0_star) for g in cfg.groups.groups]
        for g, k in enumerate(c0):
            pool = self.pop.never_infected(g)
            ids = rng.choice(pool, size=k, replace=False) if k else pool[:0]
            self.pop.infect(np.sort(ids), 0)
            self.cum_infected += k

        # Confounding burn-in so day 1 already sees its steady-state caseload.
        conf = cfg.confounding
        for day in range(1 - max(conf.k_f, conf.q_f), 1):
            ids = draw_confounding_infections(self.pop, conf, stream(self.seed, "confounding", day), day, cfg.p0, cfg.t_horizon)
            self.cum_confounding += len(ids)

        self.pop.advance(0)
        counts = self.pop.counts
        i_star = counts[:, INCUBATING:ASYMPTOMATIC + 1].sum(axis=1)
        alive = self.pop.group_size - counts[:, DEAD] - counts[:, F_DEAD]
        rho = self.rho0 * 1.0
        ir = group_infection_risks(i_star, np.zeros(self.n_groups), alive, rho, cfg.epidemic.beta, cfg.government.theta)
        self._draw_infections(0, ir)

    def _draw_infections(self, t: int, ir: np.ndarray) -> None:
        cfg = self.cfg
        conf_ids = draw_confounding_infections(
            self.pop, cfg.confounding, stream(self.seed, "confounding", t + 1), t + 1, cfg.p0, cfg.t_horizon
        )
        self.cum_confounding += len(conf_ids)
        rng = stream(self.seed, "infection", t + 1)
        new = 0
        for g in range(self.n_groups):
            ids = draw_new_epidemic_infections(self.pop, float(ir[g]), rng, t + 1, self.pop.never_infected(g))
            new += len(ids)
        self.cum_infected += new

    # -- one day -----------------------------------------------------------

    def step_day(self) -> dict[str, float]:
        t = self.t + 1
        cfg = self.cfg
        econ, gov = cfg.economy, cfg.government
        pop = self.pop

        # (1) disease progression for both diseases
        pop.advance(t)
        # (2) results of tests administered at t - d
        self.ledger.resolve(t)

        counts = pop.counts
        alive = self.pop.group_size - counts[:, DEAD] - counts[:, F_DEAD]
        reported = reported_counts(pop)

        # (3) perceptions from the day's reported data
        perc = form_perceptions(
            reported, float(alive.sum()), self.beta_perceived,
            beliefs=cfg.beliefs, info_release=cfg.info_release,
            phi=self.scenario.phi, group_phi=self.scenario.group_phi, t=t, horizon=cfg.t_horizon,
        )

        # (4) activity: free agents follow fear, isolated work (1 - theta), severe/dead stay home
        severe = counts[:, SEVERE] + counts[:, F_SEVERE]
        isolated = pop.det_counts[:, INCUBATING:ASYMPTOMATIC + 1].sum(axis=1)
        free = alive - severe - isolated
        labor = econ.n0 * (fear_factor(perc.chi, econ.eps_n) * free + (1.0 - gov.theta) * isolated)
        leisure = econ.l0 * (fear_factor(perc.chi, econ.eps_l) * free + (1.0 - gov.theta) * isolated)
        act = group_gdp_and_contacts(labor, leisure, alive, self.productivity, self.rho0, econ.pi)

        # (5) production
        gdp = float(act["gdp"].sum())

        # (6) today's tests
        severe_ids = select_severe_tests(self.ledger, t)
        mild_ids, asym_ids = select_nonsevere_tests(self.ledger, int(gov.t_ns), stream(self.seed, "testing", t), t)
        batch = np.concatenate([severe_ids, mild_ids, asym_ids])
        positives = administer_and_resolve(self.ledger, batch, gov.alpha, stream(self.seed, "test_result", t), t)
        fiscal = daily_budget(gdp, len(batch), int(severe.sum()), gov.c_t, gov.c_s, gov.tau, self.pre.deficit)

        # (7) tomorrow's infections from today's latent and detected actives
        i_star = counts[:, INCUBATING:ASYMPTOMATIC + 1].sum(axis=1)
        reported = reported_counts(pop)
        ir = group_infection_risks(i_star, reported[:, 1], alive, act["rho"], cfg.epidemic.beta, gov.theta)
        if t < cfg.t_horizon:
            self._draw_infections(t, ir)

        self.t = t
        rec = self._record(t, counts, reported, alive, perc, act, fiscal, batch, severe_ids, mild_ids, asym_ids,
                           positives, ir)
        self._check(rec)
        self.records.append(rec)
        return rec

    def _record(self, t, counts, reported, alive, perc, act, fiscal, batch, severe_ids, mild_ids, asym_ids,
                positives, ir) -> dict[str, float]:
        tot = counts.sum(axis=0)
        rep = reported.sum(axis=0)
        epi_ever = int(tot[INCUBATING:RECOVERED + 1].sum())
        conf_ever = int(tot[F_SEVERE:F_RECOVERED + 1].sum())
        n_tests = len(batch)
        rec: dict[str, float] = {
            "day": t,
            "population": int(alive.sum()),
            "susceptible": int(tot[SUSCEPTIBLE]),
            "cum_infections": epi_ever,
            "new_infections": epi_ever - (self._prev["cum_infections"] if self._prev else int(self._initial_ever())),
            "active": int(tot[INCUBATING:ASYMPTOMATIC + 1].sum()),
            "incubating": int(tot[INCUBATING]),
            "severe": int(tot[SEVERE]),
            "mild": int(tot[MILD]),
            "asymptomatic": int(tot[ASYMPTOMATIC]),
            "deaths": int(tot[DEAD]),
            "recovered": int(tot[RECOVERED]),
            "conf_cum": conf_ever,
            "conf_active": int(tot[F_SEVERE] + tot[F_MILD]),
            "conf_severe": int(tot[F_SEVERE]),
            "conf_deaths": int(tot[F_DEAD]),
            "severe_total": int(tot[SEVERE] + tot[F_SEVERE]),
            "tests": n_tests,
            "tests_severe": len(severe_ids),
            "tests_mild": len(mild_ids),
            "tests_asymptomatic": len(asym_ids),
            "positives": len(positives),
            "positives_severe": int(np.count_nonzero(np.isin(positives, severe_ids, assume_unique=True))),
            "positivity": len(positives) / n_tests if n_tests else 0.0,
            "detected_cases": int(rep[0]),
            "detected_active": int(rep[1]),
            "reported_deaths": int(rep[2]),
            "cfr": perc.cfr,
            "perceived_ir": perc.ir,
            "lethality": perc.lethality,
            "ascertainment_bias": perc.bias,
            "estimated_active": perc.i_hat,
            "chi": float(perc.chi[0]) if self.n_groups == 1 else float(np.dot(perc.chi, alive) / max(alive.sum(), 1)),
            "avg_labor": float(act["pop_avg_labor"]),
            "avg_leisure": float(act["pop_avg_leisure"]),
            "contact_rate": float(act["pop_activity"]),
            "infection_risk": float(np.dot(ir, counts[:, SUSCEPTIBLE]) / max(tot[SUSCEPTIBLE], 1)),
            "gdp": fiscal.gdp,
            "revenue": fiscal.revenue,
            "exp_testing": fiscal.exp_testing,
            "exp_treatment": fiscal.exp_treatment,
            "deficit": fiscal.deficit,
            "deficit_deviation": fiscal.deficit_deviation,
            "deficit_pct_gdp": 100.0 * fiscal.deficit_deviation / self.pre.gdp if self.pre.gdp else 0.0,
            "gdp_pct_change": 100.0 * (fiscal.gdp / self.pre.gdp - 1.0) if self.pre.gdp else 0.0,
        }
        rec["cum_surplus"] = (self._prev["cum_surplus"] if self._prev else 0.0) - fiscal.deficit
        if self.n_groups > 1:
            for g, sfx in enumerate(GROUP_SUFFIX):
                rec["population" + sfx] = int(alive[g])
                rec["cum_infections" + sfx] = int(counts[g, INCUBATING:RECOVERED + 1].sum())
                rec["active" + sfx] = int(counts[g, INCUBATING:ASYMPTOMATIC + 1].sum())
                rec["deaths" + sfx] = int(counts[g, DEAD])
                rec["detected_cases" + sfx] = int(reported[g, 0])
                rec["detected_active" + sfx] = int(reported[g, 1])
                rec["reported_deaths" + sfx] = int(reported[g, 2])
                rec["cfr" + sfx] = float(perc.group_cfr[g])
                rec["chi" + sfx] = float(perc.chi[g])
                rec["avg_labor" + sfx] = float(act["avg_labor"][g])
                rec["avg_leisure" + sfx] = float(act["avg_leisure"][g])
                rec["gdp" + sfx] = float(act["gdp"][g])
                rec["infection_risk" + sfx] = float(ir[g])
            rho = act["rho"]
            rec["rho_yy"], rec["rho_yo"] = float(rho[0, 0]), float(rho[0, 1])
            rec["rho_oy"], rec["rho_oo"] = float(rho[1, 0]), float(rho[1, 1])
        return rec

    def _initial_ever(self) -> int:
        return int(np.count_nonzero(self.pop.epi_day <= 0))

    def _check(self, rec: dict[str, float]) -> None:
        p0 = self.cfg.p0
        problems = []
        if rec["susceptible"] + rec["cum_infections"] + rec["conf_cum"] != p0:
            problems.append("susceptible + epidemic-ever + confounding-ever != P0")
        # cum_infected counts tomorrow's draws too; compare against today's ever-infected
        if rec["cum_infections"] != int(np.count_nonzero(self.pop.epi_day <= rec["day"])):
            problems.append("epidemic ever-infected count disagrees with infection days")
        if rec["active"] != rec["cum_infections"] - rec["recovered"] - rec["deaths"]:
            problems.append("active != cumulative - recovered - dead")
        if rec["population"] != p0 - rec["deaths"] - rec["conf_deaths"]:
            problems.append("population != P0 - deaths")
        if not (rec["detected_cases"] <= rec["cum_infections"] and rec["detected_active"] <= rec["active"]
                and rec["reported_deaths"] <= rec["deaths"]):
            problems.append("reported series exceed latent series")
        prev = self._prev
        if prev is not None:
            for key in ("deaths", "recovered", "cum_infections", "conf_cum", "detected_cases", "conf_deaths"):
                if rec[key] < prev[key]:
                    problems.append(f"{key} decreased")
        if problems:
            raise SimulationInvariantError(f"seed {self.seed}, day {rec['day']}: " + "; ".join(problems))
        self._prev = rec

    # -- whole run ---------------------------------------------------------

    def run(self) -> ReplicationOutput:
        while self.t < self.cfg.t_horizon:
            self.step_day()
        return self.output()

    def output(self) -> ReplicationOutput:
        keys = list(self.records[0])
        series = {k: np.array([r[k] for r in self.records]) for k in keys}
        pre_gdp = self.pre.gdp
        last = self.records[-1]
        cumulative = {
            "gdp": float(series["gdp"].sum()),
            "gdp_loss": float((pre_gdp - series["gdp"]).sum()),
            "testing_expenditure": float(series["exp_testing"].sum()),
            "expenditure": float((series["exp_testing"] + series["exp_treatment"]).sum()),
            "surplus": float(-series["deficit"].sum()),
            "total_infections": float(last["cum_infections"]),
            "total_deaths": float(last["deaths"]),
            "reported_deaths": float(last["reported_deaths"]),
            "confounding_deaths": float(last["conf_deaths"]),
            "positives": float(series["positives"].sum()),
            "positives_severe": float(series["positives_severe"].sum()),
            "final_cfr": float(last["cfr"]),
        }
        if self.n_groups > 1:
            for sfx in GROUP_SUFFIX:
                cumulative["total_deaths" + sfx] = float(last["deaths" + sfx])
                cumulative["total_infections" + sfx] = float(last["cum_infections" + sfx])
                cumulative["gdp" + sfx] = float(series["gdp" + sfx].sum())
        return ReplicationOutput(seed=self.seed, series=series, cumulative=cumulative)


def run_replication(scenario: ScenarioConfig | ValidatedScenario, seed: Optional[int] = None) -> ReplicationOutput:
    """Simulate one replication; a deterministic function of (scenario, seed)."""
    return World(scenario, seed).run()


def _run_one(args):
    scenario, seed = args
    return run_replication(scenario, seed)


# --------------------------------------------------------------------------
# ensembles


@dataclass
class RunManifest:
    scenario_hash: str
    seeds: list[int]
    version: str = __version__
    day_order: str = DAY_ORDER
    streams: dict[str, int] = field(default_factory=lambda: dict(STREAMS))
    numba: bool = kernels.USE_NUMBA
    wall_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "scenario_hash": self.scenario_hash,
            "seeds": list(self.seeds),
            "version": self.version,
            "day_order": self.day_order,
            "rng": {"bit_generator": "PCG64", "stream_key": "SeedSequence(seed, spawn_key=(purpose, day + 10000))",
                    "purposes": self.streams},
            "numba": self.numba,
            "wall_seconds": self.wall_seconds,
        }


def percentile_bands(values: np.ndarray, axis: int = 0) -> dict[str, np.ndarray]:
    """Mean, 16th/84th percentiles and standard deviation along ``axis``."""
    values = np.asarray(values, dtype=float)
    return {
        "mean": values.mean(axis=axis),
        "p16": np.percentile(values, 16, axis=axis),
        "p84": np.percentile(values, 84, axis=axis),
        "sd": values.std(axis=axis),
    }


@dataclass
class EnsembleResult:
    scenario: ValidatedScenario
    replications: list[ReplicationOutput]
    manifest: RunManifest

    def stacked(self, key: str) -> np.ndarray:
        return np.stack([r.series[key] for r in self.replications])

    def cumulative(self, key: str) -> np.ndarray:
        return np.array([r.cumulative[key] for r in self.replications])

    def summary(self):
        """Per-day bands for every exported series (one row per day)."""
        import pandas as pd

        first = self.replications[0].series
        cols: dict[str, np.ndarray] = {"day": first["day"]}
        for key in first:
            if key == "day":
                continue
            for stat, arr in percentile_bands(self.stacked(key)).items():
                cols[f"{key}_{stat}"] = arr
        return pd.DataFrame(cols)

    def cumulative_frame(self):
        import pandas as pd

        rows = [{"seed": r.seed, **r.cumulative} for r in self.replications]
        return pd.DataFrame(rows)


def run_ensemble(scenario: ScenarioConfig | ValidatedScenario, seeds: Iterable[int], n_jobs: int = 1) -> EnsembleResult:
    """Run one replication per seed; results are ordered by seed."""
    vs = _as_validated(scenario)
    seeds = sorted(int(s) for s in seeds)
    if not seeds:
        raise ValueError("an ensemble needs at least one seed")
    start = time.perf_counter()
    reps = run_many([(vs, s) for s in seeds], n_jobs)
    manifest = RunManifest(scenario_hash=scenario_hash(vs.config), seeds=seeds,
                           wall_seconds=time.perf_counter() - start)
    return EnsembleResult(scenario=vs, replications=reps, manifest=manifest)


def run_many(jobs: Sequence[tuple[ValidatedScenario, int]], n_jobs: int = 1) -> list[ReplicationOutput]:
    """Run (scenario, seed) jobs, in worker processes when ``n_jobs > 1``; order is preserved."""
    if n_jobs <= 1 or len(jobs) <= 1:
        return [run_replication(s, seed) for s, seed in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as ex:
        return list(ex.map(_run_one, jobs, chunksize=1))
