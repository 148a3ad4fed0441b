import numpy as np
import pytest
from hypothesis import given, strategies as st

from testmult.perception import (FREE, ISOLATED, SEVERE, DEAD, alternative_lethality, ascertainment_adjusted_actives,
                                 case_fatality_rate, contact_rate, endogenous_contact_matrix, fear_factor,
                                 form_perceptions, labor_supply, leisure, perceived_death_risk,
                                 perceived_infection_risk)


def test_cfr():
    assert case_fatality_rate(0, 0) == 0
    assert case_fatality_rate(45, 1000) == pytest.approx(0.045)
    with pytest.raises(ValueError):
        case_fatality_rate(3, 2)


def test_perceived_infection_risk():
    assert perceived_infection_risk(0.275, 0, 50_000) == 0
    assert perceived_infection_risk(0.275, 100, 50_000) == pytest.approx(5.5e-4)
    with pytest.raises(ValueError):
        perceived_infection_risk(0.275, 1, 0)


def test_death_risk_product():
    assert perceived_death_risk(0.15, 5.5e-4) == pytest.approx(8.25e-5)
    assert perceived_death_risk(0.0, 0.3) == 0 == perceived_death_risk(0.3, 0.0)


def test_alternative_lethality_endpoints_exact():
    assert alternative_lethality(0.15, 0.045, 0, 350) == 0.15
    assert alternative_lethality(0.15, 0.045, 350, 350) == 0.045
    assert alternative_lethality(0.15, 0.045, 175, 350) == pytest.approx(0.0975)
    with pytest.raises(ValueError):
        alternative_lethality(0.15, 0.045, 351, 350)


def test_ascertainment():
    assert ascertainment_adjusted_actives(0, 100, 30, 0.045) == (100, 1.0, 30)
    c_hat, bias, i_hat = ascertainment_adjusted_actives(9, 100, 30, 0.045)
    assert (c_hat, bias, i_hat) == pytest.approx((200, 2, 60))


def test_labor_closed_form():
    assert labor_supply(FREE, 0.0, 1.0, 1000, 0.9) == 1.0
    # (1.001) ** -1000 = exp(-1000 * log1p(0.001))
    assert labor_supply(FREE, 0.001, 1.0, 1000, 0.9) == pytest.approx(np.exp(-1000 * np.log1p(0.001)), rel=1e-12)
    assert labor_supply(FREE, 0.001, 1.0, 1000, 0.9) == pytest.approx(0.36806330428884, abs=1e-12)
    assert labor_supply(ISOLATED, 0.5, 1.0, 1000, 0.9) == pytest.approx(0.1)
    assert labor_supply(SEVERE, 0.0, 1.0, 1000, 0.9) == 0 == labor_supply(DEAD, 0.0, 1.0, 1000, 0.9)
    assert leisure(FREE, 0.002, 2.0, 500, 0.9) == pytest.approx(2.0 * 1.002 ** -500)
    with pytest.raises(ValueError):
        labor_supply(FREE, -0.1, 1.0, 1000, 0.9)


@given(a=st.floats(0, 0.01), b=st.floats(0, 0.01))
def test_fear_monotone(a, b):
    lo, hi = sorted((a, b))
    assert fear_factor(hi, 1000) <= fear_factor(lo, 1000)
    assert fear_factor(hi, 0) == 1.0


def test_contact_rate():
    assert contact_rate(1, 1, 0.5) == 1
    assert contact_rate(0.8, 0.6, 0.5) == pytest.approx(0.7)


def test_contact_matrix_externality():
    rho0 = np.array([[0.95, 0.05], [0.76, 0.24]])
    shares = np.array([0.835, 0.165])
    act = np.array([1.0, 0.5])
    pop_act = float(shares @ act)
    rho = endogenous_contact_matrix(act, pop_act, rho0)
    assert pop_act == pytest.approx(0.9175)
    assert rho[1, 1] == pytest.approx(0.5 * 0.24)
    assert rho[1, 0] == pytest.approx(pop_act * 0.76)
    assert rho[0, 0] == pytest.approx(0.95)
    assert np.array_equal(endogenous_contact_matrix(np.ones(2), 1.0, rho0), rho0)


def test_aggregate_release_equalizes_groups():
    reported = np.array([[100, 20, 1], [40, 10, 9]])
    p = form_perceptions(reported, 10_000, 0.2, info_release="aggregate", phi=0.01, group_phi=(0.002, 0.07))
    assert p.chi[0] == p.chi[1]
    assert p.cfr == pytest.approx(10 / 140)
    d = form_perceptions(reported, 10_000, 0.2, info_release="disaggregated", phi=0.01, group_phi=(0.002, 0.07))
    assert d.chi[1] > d.chi[0]
    assert d.chi == pytest.approx(np.array([0.01, 9 / 40]) * 0.2 * 30 / 10_000)
    # the guard: no old cases yet
    z = form_perceptions(np.array([[100, 20, 1], [0, 0, 0]]), 10_000, 0.2, info_release="disaggregated")
    assert z.group_cfr[1] == 0 and z.chi[1] == 0


def test_exogenous_learning_state():
    reported = np.array([[200, 40, 18]])
    p0 = form_perceptions(reported, 10_000, 0.2, beliefs="exogenous-learning", phi=0.045, t=0, horizon=100)
    assert p0.lethality == p0.cfr == 0.09
    p1 = form_perceptions(reported, 10_000, 0.2, beliefs="exogenous-learning", phi=0.045, t=100, horizon=100)
    assert p1.lethality == 0.045
    assert p1.c_hat == pytest.approx(400) and p1.bias == pytest.approx(2) and p1.i_hat == pytest.approx(80)
    assert p1.chi[0] == pytest.approx(0.045 * 0.2 * 80 / 10_000)
