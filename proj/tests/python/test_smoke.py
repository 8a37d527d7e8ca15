import math
import os

import pytest

import lexc

CONFIG_DIR = os.environ.get(
    "LEXC_CONFIG_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "configs")
)

BROWNIAN = """[experiment]
kind = arcsine
seed = 3
[model]
type = levy
beta = 0
sigma = 1
jumps = none
[budget]
horizon = 1
dt = 0.001
replicas = 300
"""


def test_closed_forms():
    assert lexc.stable_lifetime_tail(4.0, 0.5) == pytest.approx(0.5 / math.sqrt(math.pi), rel=1e-13)
    assert lexc.height_lifetime_ratio_constant(1.5) == pytest.approx(0.5 * math.gamma(1 / 3), rel=1e-13)
    assert lexc.stable_scale_function(4.0, 1.5) == pytest.approx(2.0 / math.gamma(1.5), rel=1e-13)
    assert lexc.pareto_limit_cdf(2.0, 1.0, 1.5) == pytest.approx(1 - 2 ** -1.5)
    with pytest.raises(ValueError):
        lexc.stable_lifetime_tail(1.0, 1.0)


def test_experiment_table():
    kinds = lexc.experiment_kinds()
    assert len(kinds) == 10
    assert "big_jump" in kinds
    assert len(lexc.experiment_table().strip().splitlines()) == 11


def test_config_round_trip_and_errors():
    text = lexc.normalize_config(BROWNIAN)
    assert lexc.normalize_config(text) == text
    with pytest.raises(lexc.ConfigError):
        lexc.normalize_config("[experiment]\nkind = nope\n")


def test_run_experiment_is_reproducible():
    a = lexc.run_experiment(BROWNIAN)
    b = lexc.run_experiment(BROWNIAN)
    assert a == b
    assert a["experiment"] == "arcsine"
    assert {c["id"] for c in a["criteria"]} >= {"arcsine_ks"}
    c = lexc.run_experiment(BROWNIAN, seed=4)
    assert c["estimates"] != a["estimates"]


def test_closed_forms_config_passes():
    summary = lexc.run_experiment(lexc.load_text(os.path.join(CONFIG_DIR, "acceptance", "closed_forms.ini")))
    assert summary["all_pass"] is True


def test_simulate_and_decompose():
    times, values, jumps = lexc.simulate(BROWNIAN, horizon=2.0, dt=1e-3, seed=9)
    assert len(times) == len(values) == 2001
    assert jumps == []
    exc = lexc.excursions(times, values, min_lifetime=1e-3)
    assert exc
    for start, life, height in exc:
        assert 0 <= start < 2.0 and life >= 1e-3 and height > 0
    # excursions are disjoint
    ends = [s + l for s, l, _ in exc]
    assert all(ends[i] <= exc[i + 1][0] + 1e-12 for i in range(len(exc) - 1))


def test_scale_function_brownian():
    text = BROWNIAN.replace("beta = 0", "beta = 1")
    w = lexc.scale_function(text, [0.5, 1.0, 2.0])
    for x, v in zip([0.5, 1.0, 2.0], w):
        assert v == pytest.approx(1 - math.exp(-2 * x), rel=1e-4)
