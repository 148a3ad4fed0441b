import numpy as np
import pytest

from testmult import ScenarioConfig, validate
from testmult.config import EpidemicDiseaseSpec
from testmult import kernels as K
from testmult.epidemic import Population
from testmult.stochastic import stream
from testmult.testing import (DetectionLedger, administer_and_resolve, isolated_mask, reported_counts,
                              reported_series, select_nonsevere_tests, select_severe_tests)


def make_ledger(states, d=1, detected=()):
    """A population whose state array is set directly (no progression)."""
    vs = validate(ScenarioConfig(p0=len(states), epidemic=EpidemicDiseaseSpec(c0_star=0)))
    pop = Population(vs, 0)
    pop.state[:] = states
    pop.detected[list(detected)] = True
    pop.counts[0] = np.bincount(pop.state, minlength=K.N_STATES)
    pop.det_counts[0] = np.bincount(pop.state[pop.detected], minlength=K.N_STATES)
    return DetectionLedger(pop, d)


STATES = np.array([K.SEVERE, K.F_SEVERE, K.MILD, K.F_MILD, K.ASYMPTOMATIC, K.INCUBATING, K.SUSCEPTIBLE,
                   K.RECOVERED, K.DEAD, K.F_DEAD, K.SEVERE, K.MILD], dtype=np.int8)


def test_severe_selection_enumerated():
    led = make_ledger(STATES, detected=[10])
    assert select_severe_tests(led, 1).tolist() == [0, 1]


def test_waterfall_small_capacity_only_mild():
    led = make_ledger(STATES)
    mild, asym = select_nonsevere_tests(led, 2, stream(0, "testing", 1), 1)
    assert len(asym) == 0 and set(mild) <= {2, 3, 11} and len(mild) == 2


def test_waterfall_large_capacity():
    led = make_ledger(STATES)
    mild, asym = select_nonsevere_tests(led, 100, stream(0, "testing", 1), 1)
    assert mild.tolist() == [2, 3, 11]
    # dead agents are never tested; everyone else alive and unsymptomatic is eligible
    assert asym.tolist() == [4, 5, 6, 7]


def test_zero_capacity():
    led = make_ledger(STATES)
    mild, asym = select_nonsevere_tests(led, 0, stream(0, "testing", 1), 1)
    assert len(mild) == len(asym) == 0


def test_waterfall_distribution_is_uniform():
    states = np.array([K.MILD] * 4 + [K.ASYMPTOMATIC] * 6, dtype=np.int8)
    hits = np.zeros(10)
    for day in range(3000):
        led = make_ledger(states)
        mild, asym = select_nonsevere_tests(led, 6, stream(1, "testing", day), 1)
        hits[mild] += 1
        hits[asym] += 1
    assert np.all(hits[:4] == 3000)
    assert np.allclose(hits[4:] / 3000, 2 / 6, atol=0.03)


@pytest.mark.parametrize("alpha, expected", [(0.0, [0, 2, 4, 5]), (1.0, [])])
def test_only_active_epidemic_infections_test_positive(alpha, expected):
    led = make_ledger(STATES)
    tests = np.array([0, 1, 2, 3, 4, 5, 6, 7])
    pos = administer_and_resolve(led, tests, alpha, stream(0, "test_result", 1), 1)
    assert pos.tolist() == expected


def test_false_negative_rate():
    states = np.full(20_000, K.ASYMPTOMATIC, dtype=np.int8)
    led = make_ledger(states)
    pos = administer_and_resolve(led, np.arange(20_000), 0.25, stream(2, "test_result", 1), 1)
    assert len(pos) / 20_000 == pytest.approx(0.75, abs=0.01)


def test_delay_and_retest_windows():
    led = make_ledger(np.array([K.SEVERE, K.MILD, K.SUSCEPTIBLE], dtype=np.int8), d=2)
    administer_and_resolve(led, np.array([0, 1, 2]), 0.0, stream(0, "test_result", 5), 5)
    # positives wait d days; nobody tested on day 5 is eligible on days 6 and 7
    for t in (6, 7):
        led.refresh_pools(t)
        assert led.pool_counts[K.NOT_ELIGIBLE] == 3
        assert not led.pop.detected.any() or t == 7
    assert led.resolve(7).tolist() == [0, 1]
    assert led.pop.detected[:2].all() and not led.pop.detected[2]
    # the negative is eligible again on t + d + 1
    led.refresh_pools(8)
    assert led.pool[2] == K.POOL_ASYMPTOMATIC and led.pool[0] == K.NOT_ELIGIBLE


def test_same_day_results_when_no_delay():
    led = make_ledger(np.array([K.SEVERE, K.MILD], dtype=np.int8), d=0)
    administer_and_resolve(led, np.array([0, 1]), 0.0, stream(0, "test_result", 3), 3)
    assert led.pop.detected.all()
    assert reported_counts(led.pop)[0].tolist() == [2, 2, 0]


def test_isolation_and_reported_counts():
    led = make_ledger(STATES, detected=[0, 2, 7, 8])
    iso = isolated_mask(led.pop)
    assert np.flatnonzero(iso).tolist() == [0, 2]
    cases, active, deaths = reported_counts(led.pop)[0]
    assert (cases, active, deaths) == (4, 2, 1)
    rep = reported_series(led.pop, 10, 4)
    assert rep.positivity == 0.4 and rep.cases == 4


def test_pending_agents_cannot_be_retested():
    led = make_ledger(np.array([K.MILD], dtype=np.int8), d=3)
    administer_and_resolve(led, np.array([0]), 1.0, stream(0, "test_result", 1), 1)
    with pytest.raises(AssertionError):
        administer_and_resolve(led, np.array([0]), 0.0, stream(0, "test_result", 2), 2)
