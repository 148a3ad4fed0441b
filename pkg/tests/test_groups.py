import numpy as np
import pytest

from testmult.groups import group_gdp_and_contacts, group_infection_risk, group_infection_risks, meeting_probabilities

RHO0 = np.array([[0.95, 0.05], [0.76, 0.24]])


def test_no_infections_no_risk():
    ir = group_infection_risks([0, 0], [0, 0], [800, 200], RHO0, 0.2, 0.9)
    assert np.array_equal(ir, [0, 0])


def test_block_isolation():
    rho = np.array([[1.0, 0.0], [0.0, 1.0]])
    ir = group_infection_risks([0, 20], [0, 0], [800, 200], rho, 0.2, 0.9)
    assert ir[0] == 0 and ir[1] == pytest.approx(0.2 * 20 / 200)


def test_two_term_formula():
    i_star, i_det, pop = np.array([40, 10]), np.array([10, 5]), np.array([800, 200])
    f = (i_star - 0.9 * i_det) / (pop - 0.9 * i_det)
    assert np.allclose(meeting_probabilities(i_star, i_det, pop, 0.9), f)
    rho = RHO0 * 0.8
    want_o = 0.2 * (rho[1, 0] * f[0] + rho[1, 1] * f[1])
    assert group_infection_risk(1, i_star, i_det, pop, rho, 0.2, 0.9) == pytest.approx(want_o)


def test_identical_groups_nest_homogeneous():
    shares = np.array([0.5, 0.5])
    rho0 = np.tile(shares, (2, 1))
    pop = np.array([500, 500])
    i_star = np.array([30, 30])
    ir = group_infection_risks(i_star, [0, 0], pop, rho0, 0.3, 0.9)
    assert ir[0] == ir[1] == pytest.approx(0.3 * 60 / 1000)


def test_degenerate_denominator():
    # a fully isolated group with nobody infected outside isolation carries no risk
    assert meeting_probabilities(np.array([5.0]), np.array([5.0]), np.array([5.0]), 1.0)[0] == 0
    with pytest.raises(ValueError):
        meeting_probabilities(np.array([6.0]), np.array([5.0]), np.array([5.0]), 1.0)


def test_group_outputs():
    out = group_gdp_and_contacts(labor=np.array([835.0, 82.5]), leisure=np.array([835.0, 82.5]),
                                 population=np.array([835, 165]), productivity=np.array([230.0, 46.0]),
                                 rho0=RHO0, pi=0.5)
    assert out["avg_labor"] == pytest.approx([1.0, 0.5])
    assert out["pop_activity"] == pytest.approx(917.5 / 1000)
    assert out["rho"][1, 1] == pytest.approx(0.12)
    assert out["rho"][1, 0] == pytest.approx(0.76 * 0.9175)
    assert out["gdp"] == pytest.approx([835 * 230, 82.5 * 46])
