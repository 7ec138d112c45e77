import numpy as np
import pytest
from scipy import stats

from panelgranger import PRESETS, SimConfig, granger_panel, p_values, preset, simulate_panel
from panelgranger.errors import ConfigError
from panelgranger.simulate import (
    RankOneNoise,
    config_from_mapping,
    config_to_text,
    load_configs,
    sample_cross_sectional_noise,
    save_configs,
)


def test_deterministic():
    a = simulate_panel(preset("experiment2", seed=9))
    b = simulate_panel(preset("experiment2", seed=9))
    np.testing.assert_array_equal(a.panel.x, b.panel.x)
    np.testing.assert_array_equal(a.panel.y, b.panel.y)
    np.testing.assert_array_equal(a.beta, b.beta)
    c = simulate_panel(preset("experiment2", seed=10))
    assert not np.array_equal(a.panel.x, c.panel.x)


def test_member_streams_independent_of_panel_size():
    small = simulate_panel(SimConfig(n_members=3, seed=4))
    large = simulate_panel(SimConfig(n_members=8, seed=4))
    np.testing.assert_array_equal(small.panel.x, large.panel.x[:3])
    np.testing.assert_array_equal(small.beta, large.beta[:3])


def test_shapes_and_ground_truth():
    out = simulate_panel(SimConfig(n_members=7, n_timestamps=33, seed=1))
    assert out.panel.x.shape == (7, 33)
    assert out.ground_truth.all()
    assert np.all((out.beta >= 0.2) & (out.beta <= 0.8))
    null = simulate_panel(SimConfig(n_members=7, causal=False, seed=1))
    assert not null.ground_truth.any() and np.all(null.beta == 0)


def test_matched_null_shares_innovations():
    causal = simulate_panel(SimConfig(seed=5))
    null = simulate_panel(SimConfig(seed=5, causal=False))
    np.testing.assert_array_equal(causal.panel.x, null.panel.x)
    assert not np.array_equal(causal.panel.y, null.panel.y)


def test_recursion_gaussian():
    cfg = SimConfig(n_members=2, n_timestamps=20, burn_in=0, seed=3)
    out = simulate_panel(cfg)
    from panelgranger.simulate import _NOISE_X, _NOISE_Y, _draw_coefficients, _member_noise

    delta, theta, beta = _draw_coefficients(cfg)
    ex, ey = _member_noise(cfg, _NOISE_X, 20), _member_noise(cfg, _NOISE_Y, 20)
    x = np.zeros((2, 20))
    y = np.zeros((2, 20))
    x[:, 0], y[:, 0] = ex[:, 0], ey[:, 0]
    for t in range(1, 20):
        x[:, t] = delta * x[:, t - 1] + ex[:, t]
        y[:, t] = theta * y[:, t - 1] + beta * x[:, t - 1] + ey[:, t]
    np.testing.assert_allclose(out.panel.x, x, rtol=1e-13)
    np.testing.assert_allclose(out.panel.y, y, rtol=1e-13)


def test_instantaneous_uses_current_cause():
    cfg = SimConfig(n_members=1, n_timestamps=10, burn_in=0, instantaneous=True, seed=3)
    out = simulate_panel(cfg)
    from panelgranger.simulate import _draw_coefficients

    _, theta, beta = _draw_coefficients(cfg)
    x, y = out.panel.x[0], out.panel.y[0]
    resid = y[1:] - theta[0] * y[:-1] - beta[0] * x[1:]
    lagged = y[1:] - theta[0] * y[:-1] - beta[0] * x[:-1]
    assert np.var(resid) < np.var(lagged)
    assert np.var(resid) == pytest.approx(0.1, rel=0.9)


def test_missing_edges():
    out = simulate_panel(SimConfig(n_members=400, missing_edge_prob=0.5, seed=2))
    assert 0.4 < out.ground_truth.mean() < 0.6
    assert np.all(out.beta[~out.ground_truth] == 0)
    assert simulate_panel(SimConfig(n_members=50, missing_edge_prob=1.0)).ground_truth.sum() == 0


def test_uniform_noise_interval():
    cfg = SimConfig(n_members=1, n_timestamps=500, burn_in=0, noise_family="uniform_iid", causal=False, seed=0)
    from panelgranger.simulate import _NOISE_X, _member_noise

    e = _member_noise(cfg, _NOISE_X, 500)
    assert e.min() >= 0.2 and e.max() <= 0.8
    assert simulate_panel(cfg).panel.x.mean() > 0


def test_block_noise_repeats():
    cfg = SimConfig(n_members=2, noise_family="block_dependent", block_len=3)
    from panelgranger.simulate import _NOISE_X, _member_noise

    e = _member_noise(cfg, _NOISE_X, 10)
    np.testing.assert_array_equal(e[:, 0], e[:, 1])
    np.testing.assert_array_equal(e[:, 1], e[:, 2])
    assert not np.array_equal(e[:, 2], e[:, 3])
    assert e.shape == (2, 10)


class TestRankOne:
    def test_single_member_variance(self):
        g = sample_cross_sectional_noise(1, seed=0)
        assert 0.5 <= g.loadings[0] <= 1.5
        draws = np.array([g.step()[0] for _ in range(20000)])
        assert 0.25 <= np.var(draws) <= 2.25

    def test_perfect_correlation(self):
        z = RankOneNoise(5, seed=1).sample(10_000)
        corr = np.corrcoef(z)
        assert np.all(np.abs(corr) >= 0.99)

    def test_covariance(self):
        g = RankOneNoise(4, seed=2)
        z = g.sample(100_000)
        np.testing.assert_allclose(np.cov(z), g.covariance, rtol=0.05)

    def test_bad_size(self):
        with pytest.raises(ConfigError):
            RankOneNoise(0, seed=1)

    def test_x_and_y_factors_independent(self):
        out = simulate_panel(preset("experiment2", causal=False, n_members=3, n_timestamps=5000, seed=8))
        ex = np.diff(out.panel.x[0])
        ey = np.diff(out.panel.y[0])
        assert abs(np.corrcoef(ex, ey)[0, 1]) < 0.05


def test_stability():
    for name in PRESETS:
        out = simulate_panel(preset(name, n_timestamps=10_000, n_members=5, seed=1))
        assert np.abs(out.panel.x).max() < 100 and np.abs(out.panel.y).max() < 100


def test_lag_one_autocorrelation():
    out = simulate_panel(SimConfig(n_members=1, n_timestamps=50_000, causal=False, seed=12))
    from panelgranger.simulate import _draw_coefficients

    delta = _draw_coefficients(out.config)[0][0]
    x = out.panel.x[0]
    assert np.corrcoef(x[1:], x[:-1])[0, 1] == pytest.approx(delta, abs=0.02)


def test_null_member_pvalues_uniform():
    p = np.concatenate([
        p_values(granger_panel(simulate_panel(preset("experiment1", causal=False, n_members=250, seed=s)).panel, 1))
        for s in range(20)
    ])
    assert p.size == 5000
    assert stats.kstest(p, "uniform").pvalue > 0.01


@pytest.mark.parametrize(
    "changes",
    [
        {"n_members": 0},
        {"n_timestamps": 0},
        {"coef_law_delta": (0.8, 0.2)},
        {"coef_law_theta": (0.5, 1.2)},
        {"missing_edge_prob": 1.5},
        {"noise_family": "cauchy"},
        {"noise_variance": 0.0},
        {"lag_order": 2},
        {"block_len": 0},
        {"burn_in": -1},
    ],
)
def test_invalid_config(changes):
    with pytest.raises(ConfigError):
        SimConfig(**changes)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("experiment9")


def test_config_round_trip(tmp_path):
    configs = {name: cfg for name, cfg in PRESETS.items()}
    path = tmp_path / "regimes.ini"
    save_configs(configs, path)
    assert load_configs(path) == configs


def test_config_file_with_preset_and_overrides(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[dep]\npreset = experiment2\nn_members = 12\ncoef_law_beta = 0.6, 0.8\ninstantaneous = yes\n")
    cfg = load_configs(path)["dep"]
    assert cfg.noise_family == "cross_sectional_rank1"
    assert cfg.n_members == 12 and cfg.coef_law_beta == (0.6, 0.8) and cfg.instantaneous


@pytest.mark.parametrize("mapping", [{"bogus": "1"}, {"n_members": "ten"}, {"causal": "maybe"}, {"coef_law_beta": "0.1"}])
def test_config_parse_errors(mapping):
    with pytest.raises(ConfigError):
        config_from_mapping(mapping)


def test_config_text_mentions_every_field():
    text = config_to_text({"a": SimConfig()})
    for field in SimConfig.__dataclass_fields__:
        assert f"{field} =" in text


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_configs(tmp_path / "nope.ini")
