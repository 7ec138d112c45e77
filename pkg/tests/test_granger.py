import numpy as np
import pytest
from scipy import stats

from panelgranger import (
    Panel,
    SeriesPair,
    granger_member_test,
    granger_panel,
    ols_fit,
    p_values,
    preset,
    simulate_panel,
)
from panelgranger.errors import (
    DegenerateSeries,
    DimensionMismatch,
    DomainError,
    InsufficientData,
    MemberError,
    RankDeficient,
)
from panelgranger.numstats import f_cdf
from panelgranger.granger import min_length

FIXED_X = np.array([0.3, -1.2, 0.8, 2.1, -0.4, 0.9, 1.7, -2.2, 0.1, 0.6, -0.9, 1.4])
FIXED_Y = np.array([1.0, 0.2, -0.7, 0.5, 1.9, -0.3, 0.4, 2.2, -1.5, 0.0, 0.8, -0.6])


def two_regression_oracle(x, y, P):
    """F statistic from two independent least-squares fits."""
    T = len(y)
    rows = range(P, T)
    own = [[y[t - p] for p in range(1, P + 1)] for t in rows]
    cross = [[x[t - p] for p in range(1, P + 1)] for t in rows]
    resp = np.array([y[t] for t in rows])
    Xr = np.column_stack([np.ones(len(resp)), np.array(own)])
    Xu = np.column_stack([Xr, np.array(cross)])
    rr = np.linalg.lstsq(Xr, resp, rcond=None)[1][0]
    ru = np.linalg.lstsq(Xu, resp, rcond=None)[1][0]
    df = len(resp) - 2 * P - 1
    f = ((rr - ru) / P) / (ru / df)
    return f, df, stats.f.sf(f, P, df)


def test_fixed_pair_matches_oracle():
    res = granger_member_test(SeriesPair(FIXED_X, FIXED_Y), 1)
    f, df, p = two_regression_oracle(FIXED_X, FIXED_Y, 1)
    assert res.f_stat == pytest.approx(f, rel=1e-10)
    assert res.df_num == 1 and res.df_den == df == 8
    assert res.p_value == pytest.approx(p, rel=1e-9)


def test_oracle_via_ols_fit():
    P, T = 2, 12
    y, x = FIXED_Y, FIXED_X
    resp = y[P:]
    Xr = np.column_stack([np.ones(T - P), y[1:T - 1], y[0:T - 2]])
    Xu = np.column_stack([Xr, x[1:T - 1], x[0:T - 2]])
    rr, ru = ols_fit(Xr, resp).rss, ols_fit(Xu, resp).rss
    res = granger_member_test(SeriesPair(x, y), P)
    assert res.f_stat == pytest.approx(((rr - ru) / P) / (ru / (T - P - 2 * P - 1)), rel=1e-10)
    assert res.rss_restricted == pytest.approx(rr, rel=1e-10)
    assert res.rss_unrestricted == pytest.approx(ru, rel=1e-10)


def test_random_instances_match_oracle(rng):
    for _ in range(100):
        P = int(rng.integers(1, 4))
        T = int(rng.integers(min_length(P), 40))
        x, y = rng.standard_normal(T), rng.standard_normal(T)
        res = granger_member_test(SeriesPair(x, y), P)
        f, _, _ = two_regression_oracle(x, y, P)
        assert res.f_stat == pytest.approx(f, rel=1e-10)


def test_matches_statsmodels(rng):
    from statsmodels.tsa.stattools import grangercausalitytests

    for P in (1, 2, 4):
        x, y = rng.standard_normal(80), rng.standard_normal(80)
        sm = grangercausalitytests(np.column_stack([y, x]), [P])[P][0]["ssr_ftest"]
        res = granger_member_test(SeriesPair(x, y), P)
        assert res.f_stat == pytest.approx(sm[0], rel=1e-9)
        assert res.p_value == pytest.approx(sm[1], rel=1e-8, abs=1e-14)
        assert res.df_den == sm[2]


def test_shifted_cause_nonnegative(rng):
    y = np.zeros(60)
    e = rng.standard_normal(60)
    for t in range(1, 60):
        y[t] = 0.5 * y[t - 1] + e[t]
    x = np.roll(y, 1)
    res = granger_member_test(SeriesPair(x, y), 1)
    assert res.f_stat >= 0 and res.rss_restricted >= res.rss_unrestricted


def test_p_value_complements_cdf(rng):
    res = granger_member_test(SeriesPair(rng.standard_normal(50), rng.standard_normal(50)), 2)
    assert res.p_value + f_cdf(res.f_stat, res.df_num, res.df_den) == 1.0


def test_scale_invariance(rng):
    x, y = rng.standard_normal(50), rng.standard_normal(50)
    a = granger_member_test(SeriesPair(x, y), 2).f_stat
    b = granger_member_test(SeriesPair(-7.5 * x, -7.5 * y), 2).f_stat
    c = granger_member_test(SeriesPair(3e4 * x, 1e-3 * y), 2).f_stat
    assert b == pytest.approx(a, rel=1e-8)
    assert c == pytest.approx(a, rel=1e-8)


def test_wald_is_p_times_f(rng):
    res = granger_member_test(SeriesPair(rng.standard_normal(40), rng.standard_normal(40)), 3)
    assert res.wald == 3 * res.f_stat


class TestPreconditions:
    def test_minimum_length(self, rng):
        granger_member_test(SeriesPair(rng.standard_normal(5), rng.standard_normal(5)), 1)
        with pytest.raises(InsufficientData):
            granger_member_test(SeriesPair(rng.standard_normal(4), rng.standard_normal(4)), 1)
        with pytest.raises(InsufficientData):
            granger_member_test(SeriesPair(rng.standard_normal(10), rng.standard_normal(10)), 3)

    def test_bad_lag(self, rng):
        pair = SeriesPair(rng.standard_normal(20), rng.standard_normal(20))
        for P in (0, -1, 1.5):
            with pytest.raises(DomainError):
                granger_member_test(pair, P)

    def test_constant_cause(self, rng):
        with pytest.raises(RankDeficient):
            granger_member_test(SeriesPair(np.ones(30), rng.standard_normal(30)), 1)

    def test_deterministic_effect(self):
        x = np.sin(np.arange(30.0))
        y = np.zeros(30)
        for t in range(1, 30):
            y[t] = 1.0 + 0.5 * y[t - 1] + 3.0 * x[t - 1]
        with pytest.raises(DegenerateSeries):
            granger_member_test(SeriesPair(x, y), 1)

    def test_pair_validation(self):
        with pytest.raises(DimensionMismatch):
            SeriesPair(np.ones(3), np.ones(4))
        with pytest.raises(DomainError):
            SeriesPair(np.array([1.0, np.inf]), np.ones(2))


class TestPanel:
    def test_singleton(self, rng):
        pair = SeriesPair(rng.standard_normal(30), rng.standard_normal(30))
        (res,) = granger_panel(Panel.from_pairs([pair], ["a"]), 2)
        single = granger_member_test(pair, 2, "a")
        assert res.f_stat == pytest.approx(single.f_stat, rel=1e-12)
        assert res.label == "a"

    def test_batch_matches_member(self, rng):
        panel = Panel(rng.standard_normal((6, 45)), rng.standard_normal((6, 45)))
        for res, pair in zip(granger_panel(panel, 3), panel.members):
            assert res.f_stat == pytest.approx(granger_member_test(pair, 3).f_stat, rel=1e-10)

    def test_role_swap(self, rng):
        a, b = rng.standard_normal((4, 30)), rng.standard_normal((4, 30))
        left = granger_panel(Panel(a, b), 1, "y_to_x")
        right = granger_panel(Panel(b, a), 1, "x_to_y")
        assert [r.f_stat for r in left] == [r.f_stat for r in right]

    def test_strict_and_lenient(self, rng):
        x, y = rng.standard_normal((3, 30)), rng.standard_normal((3, 30))
        x[1] = 1.0
        panel = Panel(x, y, ["a", "b", "c"])
        with pytest.raises(MemberError) as info:
            granger_panel(panel, 1)
        assert info.value.label == "b"
        res = granger_panel(panel, 1, strict=False)
        assert [r.skipped for r in res] == [False, True, False]
        assert "RankDeficient" in res[1].error
        assert p_values(res).size == 2

    def test_bad_direction(self, rng):
        with pytest.raises(DomainError):
            granger_panel(Panel(rng.standard_normal((2, 20)), rng.standard_normal((2, 20))), 1, "sideways")

    def test_panel_validation(self):
        with pytest.raises(DimensionMismatch):
            Panel(np.ones((2, 5)), np.ones((3, 5)))
        with pytest.raises(DimensionMismatch):
            Panel(np.ones((2, 5)), np.ones((2, 5)), ["only-one"])
        with pytest.raises(DimensionMismatch):
            Panel.from_pairs([SeriesPair(np.ones(3), np.ones(3)), SeriesPair(np.ones(4), np.ones(4))])

    def test_subset_and_swap(self, rng):
        panel = Panel(rng.standard_normal((4, 10)), rng.standard_normal((4, 10)), list("abcd"))
        sub = panel.subset([2, 0])
        assert sub.labels == ["c", "a"]
        np.testing.assert_array_equal(sub.y[0], panel.y[2])
        np.testing.assert_array_equal(panel.swapped().x, panel.y)
        assert len(panel) == 4 and panel[1].x is not None


def test_seeded_causal_panel_all_significant(exp1_causal):
    p = p_values(granger_panel(exp1_causal.panel, 1))
    assert p.size == 30
    assert np.all(p < 0.05)


def test_null_calibration_ks():
    """10,000 null members pooled from seeded Experiment-1 panels."""
    p = []
    for seed in range(100):
        sim = simulate_panel(preset("experiment1", causal=False, n_members=100, seed=5000 + seed))
        p.append(p_values(granger_panel(sim.panel, 1)))
    p = np.concatenate(p)
    assert p.size == 10_000
    assert stats.kstest(p, "uniform").pvalue > 0.01


def test_time_shuffle_destroys_causality(exp1_causal):
    rng = np.random.default_rng(7)
    pair = exp1_causal.panel[0]
    ps = [granger_member_test(SeriesPair(rng.permutation(pair.x), pair.y), 1).p_value for _ in range(200)]
    assert np.mean(ps) > 0.2
