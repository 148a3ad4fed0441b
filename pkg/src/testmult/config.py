"""Scenario parameter containers, validation and JSON (de)serialization."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field, fields
from typing import Any, Optional

BELIEFS = ("testing-data", "exogenous-learning")
INFO_RELEASE = ("aggregate", "disaggregated")
LAG_DISTRIBUTIONS = ("poisson", "geometric")

SIMPLEX_TOL = 1e-12
ROW_SUM_TOL = 1e-12


class ScenarioError(ValueError):
    """Raised when a scenario violates one or more invariants.

    ``errors`` holds one ``"<field path>: <message>"`` string per violation.
    """

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.errors))


@dataclass(frozen=True)
class EpidemicDiseaseSpec:
    beta: float = 0.275
    s: float = 0.30
    m: float = 0.40
    a: float = 0.30
    phi_s: float = 0.15
    phi_m: float = 0.0
    phi_a: float = 0.0
    p: float = 3
    k_tilde: float = 5
    q_tilde: float = 11
    c0_star: int = 50
    # Mean symptoms->recovery lag for severe cases when it differs from q_tilde.
    q_tilde_severe: Optional[float] = None
    lag_distribution: str = "poisson"


@dataclass(frozen=True)
class ConfoundingDiseaseSpec:
    omega_f: float = 0.20
    sigma_f: float = 0.10
    s_f: float = 0.10
    phi_f: float = 0.02
    k_f: int = 7
    q_f: int = 7


@dataclass(frozen=True)
class EconomyParams:
    n0: float = 1.0
    l0: float = 1.0
    productivity: float = 175.0
    eps_n: float = 1000.0
    eps_l: float = 1000.0
    pi: float = 0.5


@dataclass(frozen=True)
class GovernmentParams:
    c_t: float = 25.0
    c_s: float = 300.0
    tau: float = 0.30
    d: int = 1
    alpha: float = 0.25
    theta: float = 0.9
    t_ns: int = 0


@dataclass(frozen=True)
class GroupSpec:
    name: str
    share: float
    productivity: float
    phi_s: float
    c0_star: int


@dataclass(frozen=True)
class GroupsConfig:
    groups: tuple[GroupSpec, ...]
    rho0: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class ScenarioConfig:
    p0: int = 50_000
    t_horizon: int = 350
    epidemic: EpidemicDiseaseSpec = field(default_factory=EpidemicDiseaseSpec)
    confounding: ConfoundingDiseaseSpec = field(default_factory=ConfoundingDiseaseSpec)
    economy: EconomyParams = field(default_factory=EconomyParams)
    government: GovernmentParams = field(default_factory=GovernmentParams)
    groups: Optional[GroupsConfig] = None
    beliefs: str = "testing-data"
    info_release: str = "aggregate"
    # None means agents use the true transmission coefficient.
    perceived_beta: Optional[float] = None
    seed: int = 0

    def replace(self, **changes: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ValidatedScenario:
    """A scenario that passed :func:`validate`, plus derived quantities."""

    config: ScenarioConfig
    phi: float
    group_phi: tuple[float, ...]
    reducible: bool

    @property
    def n_groups(self) -> int:
        return 1 if self.config.groups is None else len(self.config.groups.groups)


def derive_unconditional_ifr(spec: EpidemicDiseaseSpec, phi_s: Optional[float] = None) -> float:
    """Probability that an infected individual dies, marginalizing over symptom type."""
    phi_s = spec.phi_s if phi_s is None else phi_s
    return spec.s * phi_s + spec.m * spec.phi_m + spec.a * spec.phi_a


# --------------------------------------------------------------------------
# validation


def _is_prob(x: float) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and 0.0 <= x <= 1.0


def _is_int_days(x: Any) -> bool:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        return False
    return math.isfinite(x) and float(x).is_integer()


def _check_epidemic(e: EpidemicDiseaseSpec, errs: list[str]) -> None:
    path = "epidemic"
    for name in ("s", "m", "a", "phi_s", "phi_m", "phi_a"):
        if not _is_prob(getattr(e, name)):
            errs.append(f"{path}.{name}: must be a probability in [0, 1]")
    total = e.s + e.m + e.a
    if abs(total - 1.0) > SIMPLEX_TOL:
        errs.append(f"{path}.s+m+a: symptom probabilities must sum to 1 (got {total!r})")
    if not (isinstance(e.beta, (int, float)) and e.beta >= 0):
        errs.append(f"{path}.beta: must be >= 0")
    if not _is_int_days(e.p) or e.p < 1:
        errs.append(f"{path}.p: incubation mean must be an integer number of days >= 1")
    # geometric lags are hazards, so their means need not be whole days
    whole = e.lag_distribution != "geometric"
    for name in ("k_tilde", "q_tilde", "q_tilde_severe"):
        v = getattr(e, name)
        if v is None and name == "q_tilde_severe":
            continue
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not v >= 0 or (whole and not _is_int_days(v)):
            errs.append(f"{path}.{name}: must be a {'whole ' if whole else ''}number of days >= 0")
    if not _is_int_days(e.c0_star) or e.c0_star < 0:
        errs.append(f"{path}.c0_star: must be a non-negative integer")
    if e.lag_distribution not in LAG_DISTRIBUTIONS:
        errs.append(f"{path}.lag_distribution: must be one of {LAG_DISTRIBUTIONS}")


def _check_confounding(c: ConfoundingDiseaseSpec, errs: list[str]) -> None:
    path = "confounding"
    for name in ("omega_f", "s_f", "phi_f"):
        if not _is_prob(getattr(c, name)):
            errs.append(f"{path}.{name}: must be a probability in [0, 1]")
    if not (isinstance(c.sigma_f, (int, float)) and c.sigma_f >= 0):
        errs.append(f"{path}.sigma_f: must be >= 0")
    for name in ("k_f", "q_f"):
        v = getattr(c, name)
        if not _is_int_days(v) or v < 1:
            errs.append(f"{path}.{name}: must be an integer number of days >= 1")


def _check_economy(e: EconomyParams, errs: list[str]) -> None:
    path = "economy"
    for name in ("n0", "l0"):
        if not getattr(e, name) > 0:
            errs.append(f"{path}.{name}: must be > 0")
    for name in ("eps_n", "eps_l", "productivity"):
        if not getattr(e, name) >= 0:
            errs.append(f"{path}.{name}: must be >= 0")
    if not _is_prob(e.pi):
        errs.append(f"{path}.pi: must be in [0, 1]")


def _check_government(g: GovernmentParams, errs: list[str]) -> None:
    path = "government"
    for name in ("tau", "alpha", "theta"):
        if not _is_prob(getattr(g, name)):
            errs.append(f"{path}.{name}: must be in [0, 1]")
    for name in ("c_t", "c_s"):
        if not getattr(g, name) >= 0:
            errs.append(f"{path}.{name}: must be >= 0")
    if not _is_int_days(g.d) or g.d < 0:
        errs.append(f"{path}.d: must be an integer number of days >= 0")
    if not _is_int_days(g.t_ns) or g.t_ns < 0:
        errs.append(f"{path}.t_ns: must be a non-negative integer")


def _check_groups(cfg: ScenarioConfig, errs: list[str]) -> bool:
    """Validate the two-group block; returns True if it reduces to the homogeneous model."""
    gc = cfg.groups
    assert gc is not None
    if len(gc.groups) != 2:
        errs.append(f"groups.groups: exactly 2 groups are supported (got {len(gc.groups)})")
        return False
    shares = 0.0
    for i, g in enumerate(gc.groups):
        path = f"groups.groups[{i}]"
        if not _is_prob(g.share):
            errs.append(f"{path}.share: must be in [0, 1]")
        if not _is_prob(g.phi_s):
            errs.append(f"{path}.phi_s: must be a probability in [0, 1]")
        if not g.productivity >= 0:
            errs.append(f"{path}.productivity: must be >= 0")
        if not _is_int_days(g.c0_star) or g.c0_star < 0:
            errs.append(f"{path}.c0_star: must be a non-negative integer")
        shares += g.share
    if abs(shares - 1.0) > SIMPLEX_TOL:
        errs.append(f"groups.groups[*].share: shares must sum to 1 (got {shares!r})")
    rho = gc.rho0
    if len(rho) != 2 or any(len(r) != 2 for r in rho):
        errs.append("groups.rho0: must be a 2x2 matrix")
        return False
    for i, row in enumerate(rho):
        if any(x < 0 for x in row):
            errs.append(f"groups.rho0[{i}]: entries must be >= 0")
        if abs(sum(row) - 1.0) > ROW_SUM_TOL:
            errs.append(f"groups.rho0[{i}]: row must sum to 1 (got {sum(row)!r})")
    n_y = round(gc.groups[0].share * cfg.p0)
    if gc.groups[0].c0_star > n_y or gc.groups[1].c0_star > cfg.p0 - n_y:
        errs.append("groups.groups[*].c0_star: initial infections exceed group population")
    g0, g1 = gc.groups
    same = g0.productivity == g1.productivity and g0.phi_s == g1.phi_s
    rows_match = all(
        abs(rho[i][j] - gc.groups[j].share) <= ROW_SUM_TOL for i in range(2) for j in range(2)
    )
    return same and rows_match


def validate(config: ScenarioConfig) -> ValidatedScenario:
    """Check every invariant of ``config``; raise :class:`ScenarioError` listing all violations."""
    errs: list[str] = []
    if not _is_int_days(config.p0) or config.p0 < 1:
        errs.append("p0: must be an integer >= 1")
    if not _is_int_days(config.t_horizon) or config.t_horizon < 1:
        errs.append("t_horizon: must be an integer number of days >= 1")
    if config.beliefs not in BELIEFS:
        errs.append(f"beliefs: must be one of {BELIEFS}")
    if config.info_release not in INFO_RELEASE:
        errs.append(f"info_release: must be one of {INFO_RELEASE}")
    if config.perceived_beta is not None and not config.perceived_beta >= 0:
        errs.append("perceived_beta: must be >= 0")
    if not isinstance(config.seed, int) or isinstance(config.seed, bool) or config.seed < 0:
        errs.append("seed: must be a non-negative integer")
    _check_epidemic(config.epidemic, errs)
    _check_confounding(config.confounding, errs)
    _check_economy(config.economy, errs)
    _check_government(config.government, errs)
    reducible = False
    if config.groups is not None:
        reducible = _check_groups(config, errs)
    elif config.epidemic.c0_star > config.p0:
        errs.append("epidemic.c0_star: initial infections exceed p0")
    if errs:
        raise ScenarioError(errs)

    phi = derive_unconditional_ifr(config.epidemic)
    if config.groups is None:
        group_phi: tuple[float, ...] = (phi,)
    else:
        group_phi = tuple(derive_unconditional_ifr(config.epidemic, g.phi_s) for g in config.groups.groups)
        # population-level IFR is the share-weighted mix of the group IFRs
        phi = sum(g.share * f for g, f in zip(config.groups.groups, group_phi))
    return ValidatedScenario(config=config, phi=phi, group_phi=group_phi, reducible=reducible)


# --------------------------------------------------------------------------
# serialization

_SECTIONS = {
    "epidemic": EpidemicDiseaseSpec,
    "confounding": ConfoundingDiseaseSpec,
    "economy": EconomyParams,
    "government": GovernmentParams,
}


def to_dict(config: ScenarioConfig) -> dict[str, Any]:
    out = dataclasses.asdict(config)
    if config.groups is not None:
        out["groups"] = {
            "groups": [dataclasses.asdict(g) for g in config.groups.groups],
            "rho0": [list(r) for r in config.groups.rho0],
        }
    return out


def _build(cls: type, data: Any, path: str) -> Any:
    if not isinstance(data, dict):
        raise ScenarioError([f"{path}: expected an object"])
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ScenarioError([f"{path}.{k}: unknown key" for k in unknown])
    try:
        return cls(**data)
    except TypeError as exc:
        raise ScenarioError([f"{path}: {exc}"]) from None


def from_dict(data: dict[str, Any]) -> ScenarioConfig:
    """Build a config from plain data; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise ScenarioError(["<root>: expected an object"])
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ScenarioError([f"{k}: unknown key" for k in unknown])
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key in _SECTIONS:
            kwargs[key] = _build(_SECTIONS[key], value, key)
        elif key == "groups":
            kwargs[key] = None if value is None else _groups_from_dict(value)
        else:
            kwargs[key] = value
    return ScenarioConfig(**kwargs)


def _groups_from_dict(data: Any) -> GroupsConfig:
    if not isinstance(data, dict) or set(data) - {"groups", "rho0"}:
        extra = sorted(set(data) - {"groups", "rho0"}) if isinstance(data, dict) else []
        raise ScenarioError([f"groups.{k}: unknown key" for k in extra] or ["groups: expected an object"])
    groups = tuple(_build(GroupSpec, g, f"groups.groups[{i}]") for i, g in enumerate(data.get("groups", [])))
    rho0 = tuple(tuple(float(x) for x in row) for row in data.get("rho0", []))
    return GroupsConfig(groups=groups, rho0=rho0)


def dumps(config: ScenarioConfig) -> str:
    return json.dumps(to_dict(config), indent=2, sort_keys=True)


def loads(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"<json> line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    return from_dict(data)


def scenario_hash(config: ScenarioConfig) -> str:
    canonical = json.dumps(to_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def apply_overrides(config: ScenarioConfig, overrides: list[str]) -> ScenarioConfig:
    """Apply ``section.key=value`` overrides (values parsed as JSON, else kept as strings)."""
    data = to_dict(config)
    for item in overrides:
        if "=" not in item:
            raise ScenarioError([f"{item}: override must look like key=value"])
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = data
        parts = key.strip().split(".")
        for part in parts[:-1]:
            if isinstance(node, list):
                node = node[int(part)]
            elif isinstance(node, dict) and part in node and node[part] is not None:
                node = node[part]
            else:
                raise ScenarioError([f"{key}: unknown key"])
        last = parts[-1]
        if isinstance(node, list):
            node[int(last)] = value
        elif last in node:
            node[last] = value
        else:
            raise ScenarioError([f"{key}: unknown key"])
    return from_dict(data)
