"""Scenario configs, data generation, Monte-Carlo risk and end-to-end runs."""

import math

import numpy as np
import pytest
from scipy import stats

import scenarios
from rhosel.config import ConfigError, from_dict, load_config
from rhosel.expfam import Gaussian, mean_parametrization
from rhosel.io import dataset_to_csv, read_dataset, write_dataset
from rhosel.rho import CandidateFunction
from rhosel.simulate import build_truth, generate, mc_hellinger_risk, rate_study, run_selection


def const_cfg(value=0.3, **extra):
    raw = {
        "family": "gaussian(sigma=1)",
        "parametrization": {"kind": "mean"},
        "clamp": [-3, 3],
        "truth": {"kind": "constant", "value": value},
        "n": 500,
        "menu": {"kind": "dyadic-poly", "s_max": 1, "r_max": 0},
        "seeds": {"data": 5, "fit": 6, "mc": 7},
        "mc_points": 2000,
    }
    raw.update(extra)
    return from_dict(raw)


def const_fn(c):
    return CandidateFunction(lambda W: np.full(W.shape[0], float(c)), f"c={c}", ("m",))


def test_clean_constant_truth_is_gaussian():
    data = generate(const_cfg())
    res = stats.kstest(data.y, stats.norm(loc=0.3).cdf)
    assert res.pvalue > 0.01


def test_tiny_contamination_leaves_data_unchanged():
    clean = generate(const_cfg(n=100))
    dirty = generate(const_cfg(n=100, contamination={"eps": 1e-9, "outlier": "far-end"}))
    np.testing.assert_array_equal(clean.y, dirty.y)
    np.testing.assert_array_equal(clean.W, dirty.W)


def test_contamination_only_moves_flipped_points():
    clean = generate(const_cfg(n=2000))
    dirty = generate(const_cfg(n=2000, contamination={"eps": 0.1, "outlier": "far-end"}))
    moved = clean.y != dirty.y
    assert 0.07 < moved.mean() < 0.13
    # truth 0.3 is nearer +3, so outliers come from the -3 end
    assert dirty.y[moved].mean() < -2.0
    np.testing.assert_array_equal(clean.W, dirty.W)


def test_same_seeds_give_identical_csv():
    assert dataset_to_csv(generate(const_cfg())) == dataset_to_csv(generate(const_cfg()))
    assert dataset_to_csv(generate(const_cfg())) != dataset_to_csv(generate(const_cfg(seeds={"data": 9})))


def test_csv_roundtrip(tmp_path):
    data = generate(const_cfg(covariates={"law": "uniform", "d": 3}))
    write_dataset(data, tmp_path / "d.csv")
    back = read_dataset(tmp_path / "d.csv")
    np.testing.assert_array_equal(back.W, data.W)
    np.testing.assert_array_equal(back.y, data.y)


def test_csv_covariate_law(tmp_path):
    pts = np.random.default_rng(0).uniform(size=(20, 2))
    np.savetxt(tmp_path / "cov.csv", pts, delimiter=",", header="w1,w2", comments="")
    (tmp_path / "s.yaml").write_text(
        "family: poisson\nparametrization: {kind: natural, interval: [-3, 3]}\nclamp: [-2, 2]\n"
        "covariates: {law: csv, path: cov.csv}\ntruth: {kind: linear, coefs: [0.5, -0.5]}\n"
        "n: 50\nmenu: {kind: linear-varsel}\n"
    )
    cfg = load_config(tmp_path / "s.yaml")
    data = generate(cfg)
    assert data.W.shape == (50, 2)
    assert all(any(np.array_equal(w, p) for p in pts) for w in data.W)


def test_truth_outside_interval_is_config_error():
    cfg = from_dict({
        "family": "poisson",
        "parametrization": {"kind": "natural", "interval": [-1, 1]},
        "clamp": [-1, 1],
        "truth": {"kind": "constant", "value": 4.0},
        "n": 10,
        "menu": {"kind": "dyadic-poly", "s_max": 0},
    })
    with pytest.raises(ConfigError):
        generate(cfg)


@pytest.mark.parametrize("bad", [
    {"n": 0},
    {"clamp": [1, -1]},
    {"contamination": {"eps": 0.7}},
    {"truth": {"kind": "wiggle"}},
    {"mc_points": 10},
    {"colour": "blue"},
])
def test_config_validation(bad):
    raw = const_cfg().to_dict()
    raw.update(bad)
    with pytest.raises(ConfigError):
        from_dict(raw)


def test_clamp_outside_interval_is_rejected():
    cfg = const_cfg(parametrization={"kind": "natural", "interval": [-2, 2]})
    with pytest.raises(ConfigError):
        cfg.build_parametrization()


def test_truth_builders():
    cfg = const_cfg(truth={"kind": "sine", "amplitude": 0.5, "offset": 0.1})
    f = build_truth(cfg, 1)
    np.testing.assert_allclose(f(np.array([[0.25]])), [0.6])
    cfg = const_cfg(truth={"kind": "takagi", "t": 0.5, "terms": 30})
    assert float(build_truth(cfg, 1)(np.array([[0.5]]))[0]) == pytest.approx(0.5)
    cfg = const_cfg(truth={"kind": "linear", "coefs": {2: 1.0}}, covariates={"law": "uniform", "d": 3})
    f = build_truth(cfg, 3)
    assert f.info["support"] == [2]
    cfg = const_cfg(truth={"kind": "piecewise", "s": [1], "values": [0.0, 1.0]})
    np.testing.assert_array_equal(build_truth(cfg, 1)(np.array([[0.2], [0.8]])), [0.0, 1.0])


# --- Monte-Carlo risk ------------------------------------------------------------------


def test_mc_risk_zero_for_truth():
    cfg = const_cfg()
    par = cfg.build_parametrization()
    f = build_truth(cfg, 1)
    assert mc_hellinger_risk(f, f, par, cfg) == (0.0, 0.0)


def test_mc_risk_constant_collapse():
    cfg = const_cfg()
    par = mean_parametrization(Gaussian(1.0))
    est, se = mc_hellinger_risk(const_fn(2.0), const_fn(0.0), par, cfg)
    assert est == pytest.approx(1 - math.exp(-0.5), abs=1e-12)
    assert est == pytest.approx(0.393469, abs=1e-6)


def test_mc_risk_within_three_stderr_of_quadrature():
    cfg = const_cfg(mc_points=4000)
    par = cfg.build_parametrization()
    g_hat = CandidateFunction(lambda W: np.sin(2 * np.pi * W[:, 0]), "s", ("m",))
    est, se = mc_hellinger_risk(g_hat, const_fn(0.0), par, cfg)
    from scipy.integrate import quad
    exact = quad(lambda w: 1 - math.exp(-math.sin(2 * math.pi * w) ** 2 / 8), 0, 1)[0]
    assert abs(est - exact) <= 3 * se


# --- end to end ------------------------------------------------------------------------


def test_single_model_menu_returns_its_fit():
    cfg = const_cfg(menu={"kind": "dyadic-poly", "s_max": 0, "r_max": 0})
    rep = run_selection(cfg)
    assert rep.selected_label == "dyadic-poly[s=(0,),r=0]"
    assert rep.mc_risk < 0.01


def test_varsel_small_p_recovers_support():
    cfg = from_dict({
        "family": "gaussian(sigma=1)",
        "parametrization": {"kind": "natural", "interval": [-10, 10]},
        "clamp": [-5, 5],
        "covariates": {"law": "uniform", "d": 10},
        "truth": {"kind": "linear", "coefs": {1: 2.0, 2: -1.5}},
        "n": 2000,
        "menu": {"kind": "linear-varsel", "max_support": 4},
        "selection": {"penalty_scale": scenarios.PENALTY_SCALE},
        "seeds": {"data": 31, "fit": 32, "mc": 33},
        "mc_points": 2000,
    })
    rep = run_selection(cfg)
    assert rep.info["support"] == [1, 2]


def test_report_json_excludes_timing_by_default():
    rep = run_selection(const_cfg())
    assert "wall_time" not in rep.to_json()
    assert "wall_time" in rep.to_json(timing=True)


def test_rate_study_small_grid_is_reproducible():
    cfg = from_dict(scenarios.sine_rate())
    a = rate_study(cfg, n_grid=[128, 256], reps=5)
    b = rate_study(cfg, n_grid=[128, 256], reps=5)
    assert a.to_csv() == b.to_csv()
    assert len(a.rows) == 10
    with pytest.raises(ConfigError):
        rate_study(cfg, n_grid=[128, 256], reps=3)
    with pytest.raises(ConfigError):
        rate_study(cfg, n_grid=[256], reps=5)
