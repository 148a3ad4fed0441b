"""Testing multipliers, parameter sweeps, and the SIR-limit oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .config import ScenarioConfig, ValidatedScenario, apply_overrides, validate
from .simulation import ReplicationOutput, percentile_bands, run_many

DEFAULT_GRID = (0.0, 0.005, 0.01, 0.02, 0.04, 0.08, 0.16)
SWEEP_DIMS = {
    "alpha": "government.alpha",
    "c_t": "government.c_t",
    "d": "government.d",
    "theta": "government.theta",
    "eps": ("economy.eps_n", "economy.eps_l"),
}


def gdp_multiplier(y_t: float, y_0: float, e_t: float, e_0: float) -> Optional[float]:
    """Extra GDP per extra dollar of testing; ``None`` when spending did not rise."""
    if not e_t > e_0:
        return None
    return (y_t - y_0) / (e_t - e_0)


def surplus_multiplier(b_t: float, b_0: float, e_t: float, e_0: float) -> Optional[float]:
    """Extra cumulative surplus per extra testing dollar; -1 means no offset at all."""
    if not e_t > e_0:
        return None
    return (b_t - b_0) / (e_t - e_0)


def capacity_for_level(level: float, p0: int) -> int:
    """Daily non-severe tests for a level given as a fraction of P0 (< 1) or an absolute count."""
    if level < 0:
        raise ValueError("testing level must be >= 0")
    return int(round(level * p0)) if level < 1 else int(round(level))


@dataclass
class MultiplierEstimate:
    level: float
    capacity: int
    seeds: list[int]
    gdp_mult: np.ndarray
    surplus_mult: np.ndarray
    baseline: list[dict[str, float]]
    outcomes: list[dict[str, float]]

    def summary(self) -> dict[str, float]:
        row: dict[str, float] = {"level": self.level, "capacity": self.capacity, "n_seeds": len(self.seeds)}
        for name, vals in (("gdp_mult", self.gdp_mult), ("surplus_mult", self.surplus_mult)):
            ok = vals[~np.isnan(vals)]
            if len(ok):
                for stat, v in percentile_bands(ok).items():
                    row[f"{name}_{stat}"] = float(v)
            else:
                for stat in ("mean", "p16", "p84", "sd"):
                    row[f"{name}_{stat}"] = float("nan")
        for key in ("total_infections", "total_deaths", "gdp", "gdp_loss", "testing_expenditure", "surplus"):
            row[f"{key}_mean"] = float(np.mean([o[key] for o in self.outcomes]))
        return row


@dataclass
class MultiplierCurve:
    scenario: ValidatedScenario
    grid: list[float]
    seeds: list[int]
    zero: list[dict[str, float]]
    estimates: list[MultiplierEstimate]

    def long_rows(self) -> list[dict[str, float]]:
        rows = []
        for est in self.estimates:
            for i, seed in enumerate(est.seeds):
                rows.append({
                    "level": est.level,
                    "seed": seed,
                    "gdp_mult": _nan_to_none(est.gdp_mult[i]),
                    "surplus_mult": _nan_to_none(est.surplus_mult[i]),
                    "total_infections": est.outcomes[i]["total_infections"],
                    "total_deaths": est.outcomes[i]["total_deaths"],
                    "gdp": est.outcomes[i]["gdp"],
                    "testing_expenditure": est.outcomes[i]["testing_expenditure"],
                    "surplus": est.outcomes[i]["surplus"],
                })
        return rows

    def summary_rows(self) -> list[dict[str, float]]:
        rows = [est.summary() for est in self.estimates]
        for row in rows:
            # display metadata only; stored values are untransformed
            row["x_display"] = "log2"
        return rows

    def outcome_means(self, key: str) -> dict[float, float]:
        out = {0.0: float(np.mean([z[key] for z in self.zero]))}
        for est in self.estimates:
            out[est.level] = float(np.mean([o[key] for o in est.outcomes]))
        return out


def _nan_to_none(x: float) -> Optional[float]:
    return None if np.isnan(x) else float(x)


def _with_capacity(vs: ValidatedScenario, capacity: int) -> ValidatedScenario:
    cfg = vs.config
    return validate(replace(cfg, government=replace(cfg.government, t_ns=capacity)))


def multiplier_curve(
    scenario: ScenarioConfig | ValidatedScenario,
    grid: Sequence[float] = DEFAULT_GRID,
    seeds: Iterable[int] = range(30),
    n_jobs: int = 1,
) -> MultiplierCurve:
    """Paired multiplier estimates for every positive level of ``grid``.

    Each seed's level-0 run is shared by all levels; disease randomness is
    common across levels because streams are keyed by (seed, purpose, day).
    """
    vs = scenario if isinstance(scenario, ValidatedScenario) else validate(scenario)
    seeds = sorted(int(s) for s in seeds)
    levels = sorted({float(g) for g in grid if g > 0})
    p0 = vs.config.p0
    caps = [capacity_for_level(lv, p0) for lv in levels]

    zero_vs = _with_capacity(vs, 0)
    level_vs = [_with_capacity(vs, c) for c in caps]
    jobs = [(zero_vs, s) for s in seeds] + [(lvs, s) for lvs in level_vs for s in seeds]
    reps: list[ReplicationOutput] = run_many(jobs, n_jobs)

    n = len(seeds)
    zero = [r.cumulative for r in reps[:n]]
    estimates = []
    for i, (lv, cap) in enumerate(zip(levels, caps)):
        outs = [r.cumulative for r in reps[n * (i + 1): n * (i + 2)]]
        g = [gdp_multiplier(o["gdp"], z["gdp"], o["testing_expenditure"], z["testing_expenditure"]) for o, z in zip(outs, zero)]
        b = [surplus_multiplier(o["surplus"], z["surplus"], o["testing_expenditure"], z["testing_expenditure"])
             for o, z in zip(outs, zero)]
        estimates.append(MultiplierEstimate(
            level=lv, capacity=cap, seeds=seeds,
            gdp_mult=np.array([np.nan if x is None else x for x in g]),
            surplus_mult=np.array([np.nan if x is None else x for x in b]),
            baseline=zero, outcomes=outs,
        ))
    return MultiplierCurve(scenario=vs, grid=[0.0] + levels, seeds=seeds, zero=zero, estimates=estimates)


def sir_limit_oracle(beta: float, gamma: float, x0: float, i0: float, days: int) -> dict[str, np.ndarray]:
    """Deterministic susceptible/infected/recovered fractions for days 0..days."""
    if x0 < 0 or i0 < 0 or x0 + i0 > 1 + 1e-12:
        raise ValueError("need x0, i0 >= 0 and x0 + i0 <= 1")
    x = np.empty(days + 1)
    i = np.empty(days + 1)
    r = np.empty(days + 1)
    x[0], i[0], r[0] = x0, i0, 1.0 - x0 - i0
    for t in range(days):
        new = beta * i[t] * x[t]
        x[t + 1] = x[t] - new
        i[t + 1] = i[t] + new - gamma * i[t]
        r[t + 1] = r[t] + gamma * i[t]
    return {"x": x, "i": i, "r": r}


def sir_scenario(beta: float = 0.30, gamma: float = 1 / 14, p0: int = 1_000_000, days: int = 350,
                 c0: int = 50) -> ScenarioConfig:
    """The restricted simulator configuration that should track :func:`sir_limit_oracle`.

    Recovery is geometric with daily hazard ``gamma``: one incubation day plus
    a geometric number of extra days with mean ``1/gamma - 1``.
    """
    from .presets import SIR_LIMIT

    if not 0 < gamma <= 1:
        raise ValueError("gamma must be in (0, 1]")
    q_tilde = 1.0 / gamma - 1.0
    epi = replace(SIR_LIMIT.epidemic, beta=beta, q_tilde=q_tilde, k_tilde=q_tilde, c0_star=c0)
    return replace(SIR_LIMIT, p0=p0, t_horizon=days, epidemic=epi)


@dataclass
class SirComparison:
    oracle: dict[str, np.ndarray]
    simulated: dict[str, np.ndarray]
    sup_error: float
    seeds: list[int]


def compare_sir(beta: float = 0.30, gamma: float = 1 / 14, p0: int = 1_000_000, days: int = 350,
                seeds: Iterable[int] = range(20), c0: int = 50, n_jobs: int = 1) -> SirComparison:
    """Ensemble-mean simulator fractions against the oracle; sup norm over days 1..T and compartments.

    Simulator day t lines up with oracle step t: both start from the day-0
    seed infections, and day-t infections come from day-(t-1) prevalence.
    """
    vs = validate(sir_scenario(beta, gamma, p0, days, c0))
    seeds = sorted(int(s) for s in seeds)
    reps = run_many([(vs, s) for s in seeds], n_jobs)
    x = np.mean([r.series["susceptible"] for r in reps], axis=0) / p0
    i = np.mean([r.series["active"] for r in reps], axis=0) / p0
    r_ = np.mean([r.series["recovered"] for r in reps], axis=0) / p0
    oracle = sir_limit_oracle(beta, gamma, 1.0 - c0 / p0, c0 / p0, days)
    # simulator series cover days 1..T
    sim = {"x": x, "i": i, "r": r_}
    err = max(float(np.max(np.abs(sim[k] - oracle[k][1:]))) for k in ("x", "i", "r"))
    return SirComparison(oracle=oracle, simulated=sim, sup_error=err, seeds=seeds)


def technology_sweep(
    scenario: ScenarioConfig | ValidatedScenario,
    dims: Mapping[str, Sequence[float]],
    grid: Sequence[float] = DEFAULT_GRID,
    seeds: Iterable[int] = range(30),
    n_jobs: int = 1,
) -> list[dict[str, float]]:
    """One multiplier curve per point of the cartesian product of ``dims``; long-format rows."""
    unknown = set(dims) - set(SWEEP_DIMS)
    if unknown:
        raise ValueError(f"unknown sweep dimension(s) {sorted(unknown)}; choose from {sorted(SWEEP_DIMS)}")
    base = scenario.config if isinstance(scenario, ValidatedScenario) else scenario
    names = list(dims)
    rows = []
    for point in itertools.product(*(dims[n] for n in names)):
        overrides = []
        for name, value in zip(names, point):
            paths = SWEEP_DIMS[name]
            for path in (paths,) if isinstance(paths, str) else paths:
                overrides.append(f"{path}={value}")
        curve = multiplier_curve(apply_overrides(base, overrides), grid, seeds, n_jobs)
        for row in curve.summary_rows():
            rows.append({**dict(zip(names, point)), **row})
    return rows
