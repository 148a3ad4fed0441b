"""Bundled scenarios."""

from __future__ import annotations

from dataclasses import replace

from .config import (ConfoundingDiseaseSpec, EconomyParams, EpidemicDiseaseSpec, GovernmentParams, GroupsConfig,
                     GroupSpec, ScenarioConfig)

BASELINE = ScenarioConfig()

_SARS_GROUPS = GroupsConfig(
    groups=(
        GroupSpec(name="young", share=0.835, productivity=230.0, phi_s=0.005, c0_star=42),
        GroupSpec(name="old", share=0.165, productivity=46.0, phi_s=0.248, c0_star=8),
    ),
    rho0=((0.95, 0.05), (0.76, 0.24)),
)

SARS_COV_2 = ScenarioConfig(
    epidemic=EpidemicDiseaseSpec(beta=0.20, s=0.3, m=0.3, a=0.4, p=7, k_tilde=10, q_tilde=7, q_tilde_severe=10),
    economy=EconomyParams(eps_n=5000.0, eps_l=5000.0),
    groups=_SARS_GROUPS,
)

PSEUDO_SPANISH = replace(
    SARS_COV_2,
    t_horizon=900,
    groups=GroupsConfig(
        groups=(replace(_SARS_GROUPS.groups[0], phi_s=0.248), replace(_SARS_GROUPS.groups[1], phi_s=0.005)),
        rho0=_SARS_GROUPS.rho0,
    ),
)

# Restrictions under which the simulator collapses to a deterministic SIR model.
SIR_LIMIT = ScenarioConfig(
    p0=1_000_000,
    t_horizon=350,
    epidemic=EpidemicDiseaseSpec(beta=0.30, s=0.0, m=0.0, a=1.0, phi_s=0.0, phi_m=0.0, phi_a=0.0,
                                 p=1, k_tilde=13, q_tilde=13, c0_star=50, lag_distribution="geometric"),
    confounding=ConfoundingDiseaseSpec(omega_f=0.0, sigma_f=0.0),
    economy=EconomyParams(eps_n=0.0, eps_l=0.0),
    government=GovernmentParams(theta=0.0, t_ns=0),
)

PRESETS: dict[str, ScenarioConfig] = {
    "baseline": BASELINE,
    "unstoppable": replace(BASELINE, epidemic=replace(BASELINE.epidemic, beta=0.475)),
    "less-lethal": replace(BASELINE, epidemic=replace(BASELINE.epidemic, phi_s=0.01)),
    "never-ending": replace(BASELINE, epidemic=replace(BASELINE.epidemic, k_tilde=20, q_tilde=26)),
    "sars-cov-2": SARS_COV_2,
    "pseudo-spanish": PSEUDO_SPANISH,
    "sir-limit": SIR_LIMIT,
}

DESCRIPTIONS = {
    "baseline": "influenza-like baseline disease, homogeneous population",
    "unstoppable": "baseline with a much higher transmission coefficient",
    "less-lethal": "baseline with a low severe-case fatality risk",
    "never-ending": "baseline with long times to death and recovery",
    "sars-cov-2": "two age groups with a COVID-like calibration",
    "pseudo-spanish": "two age groups with group fatality risks swapped, long horizon",
    "sir-limit": "restricted model that reduces to a deterministic SIR recursion",
}


def get_preset(name: str) -> ScenarioConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
