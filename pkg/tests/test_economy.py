import numpy as np
import pytest

from testmult import ScenarioConfig, validate
from testmult.economy import daily_budget, daily_gdp, group_productivity, pre_epidemic, steady_state_severe
from testmult.presets import SARS_COV_2


def test_gdp():
    assert daily_gdp(np.array([50_000.0]), np.array([175.0])) == 8_750_000
    vs = validate(SARS_COV_2)
    shares = np.array([0.835, 0.165])
    y = daily_gdp(shares, group_productivity(vs))
    assert y == pytest.approx(0.835 * 230 + 0.165 * 46)
    assert 0.835 * 230 / y == pytest.approx(0.962, abs=5e-4)


def test_budget_identity():
    f = daily_budget(1000.0, tests=4, severe_count=2, c_t=25, c_s=300, tau=0.3, baseline_deficit=100.0)
    assert f.exp_testing == 100 and f.exp_treatment == 600 and f.revenue == 300
    assert f.deficit == 400 and f.deficit_deviation == 300
    assert f.expenditure == 700


def test_pre_epidemic_steady_state():
    vs = validate(ScenarioConfig())
    # 0.2 * 50000 / 350 new cases a day, 10% severe, each severe for 7 days
    assert steady_state_severe(vs) == pytest.approx(0.2 * 50_000 / 350 * 0.1 * 7)
    pre = pre_epidemic(vs, np.array([50_000]))
    assert pre.gdp == 50_000 * 175
    assert pre.deficit == pytest.approx(300 * steady_state_severe(vs) - 0.3 * 50_000 * 175)
