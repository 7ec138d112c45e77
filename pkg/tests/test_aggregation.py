import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from panelgranger.aggregation import DEFAULT_GAMMA_MIN, qppa_fixed, qppa_gamma_min, reject
from panelgranger.errors import DomainError

pvec = st.lists(st.floats(0.0, 1.0), min_size=1, max_size=50)
level = st.floats(0.001, 0.999)


class TestFixed:
    def test_all_ones(self):
        for g in (0.1, 0.5, 0.9):
            assert qppa_fixed([1, 1, 1], g).p_value == 1.0

    def test_singleton(self):
        assert qppa_fixed([0.02], 0.5).p_value == pytest.approx(0.04)

    def test_four(self):
        res = qppa_fixed([0.01, 0.02, 0.03, 0.04], 0.5)
        assert res.p_value == pytest.approx(0.04)
        assert (res.method, res.gamma, res.n_members) == ("fixed_gamma", 0.5, 4)

    def test_zero_propagates(self):
        assert qppa_fixed([0.0, 0.0, 0.3], 0.5).p_value == 0.0

    @pytest.mark.parametrize("bad", [[], [0.5, 1.2], [-0.1], [np.nan]])
    def test_bad_pvalues(self, bad):
        with pytest.raises(DomainError):
            qppa_fixed(bad, 0.5)

    @pytest.mark.parametrize("g", [0.0, 1.0, 2.0])
    def test_bad_gamma(self, g):
        with pytest.raises(DomainError):
            qppa_fixed([0.1], g)


class TestGammaMin:
    def test_all_ones(self):
        assert qppa_gamma_min([1.0] * 7).p_value == 1.0

    def test_singleton_closed_form(self):
        res = qppa_gamma_min([0.02], 0.05)
        assert res.p_value == pytest.approx((1 - math.log(0.05)) * 0.02, rel=1e-12)
        assert res.p_value == pytest.approx(0.0799, abs=1e-4)
        grid = qppa_gamma_min([0.02], 0.05, grid_size=100_000, method="grid")
        assert grid.p_value == pytest.approx(res.p_value, rel=1e-3)

    def test_default(self):
        assert DEFAULT_GAMMA_MIN == 0.05

    def test_exact_against_grid(self, rng):
        for _ in range(200):
            p = rng.uniform(size=int(rng.integers(1, 40))) ** 3
            gm = float(rng.uniform(0.01, 0.5))
            exact = qppa_gamma_min(p, gm).p_value
            grid = qppa_gamma_min(p, gm, grid_size=2000, method="grid").p_value
            assert exact <= grid + 1e-12
            # a grid point just left of breakpoint i/N overshoots by at most spacing/gamma
            spacing = (1 - gm) / 2001
            assert grid <= min(1.0, exact * (1 + spacing / gm)) + 1e-12

    def test_exact_equals_limit(self):
        p = np.array([0.001, 0.2, 0.5, 0.9])
        # breakpoints above 0.05: i/N for i=1..4 -> min(0.001*4, 0.2*2, 0.5*4/3, 0.9)
        assert qppa_gamma_min(p, 0.05).p_value == pytest.approx((1 - math.log(0.05)) * 0.004)

    def test_breakpoint_at_gamma_min_excluded(self):
        # gamma_min = 1/4 exactly: the piece ending at 1/4 lies outside (1/4, 1)
        p = np.array([0.001, 0.05, 0.06, 0.07])
        res = qppa_gamma_min(p, 0.25).p_value
        assert res == pytest.approx((1 - math.log(0.25)) * min(0.05 * 2, 0.06 * 4 / 3, 0.07))

    def test_bad_method(self):
        with pytest.raises(DomainError):
            qppa_gamma_min([0.1], 0.05, method="bisect")


class TestReject:
    def test_cases(self):
        assert reject(0.04, 0.05)
        assert reject(0.05, 0.05)
        assert not reject(0.06, 0.05)

    def test_domain(self):
        with pytest.raises(DomainError):
            reject(1.5, 0.05)
        with pytest.raises(DomainError):
            reject(0.1, 0.0)


@settings(max_examples=500, deadline=None)
@given(p=pvec, alpha=level, gamma=level)
def test_proof_equivalence(p, alpha, gamma):
    p = np.asarray(p)
    lhs = qppa_fixed(p, gamma).p_value <= alpha
    rhs = np.mean(p <= alpha * gamma) >= gamma
    assert lhs == rhs


@settings(max_examples=300, deadline=None)
@given(p=pvec, gamma=level, data=st.data())
def test_monotone(p, gamma, data):
    p = np.asarray(p)
    i = data.draw(st.integers(0, p.size - 1))
    bumped = p.copy()
    bumped[i] = data.draw(st.floats(p[i], 1.0))
    assert qppa_fixed(bumped, gamma).p_value >= qppa_fixed(p, gamma).p_value


@settings(max_examples=200, deadline=None)
@given(p=pvec, gamma=level, seed=st.integers(0, 2**31))
def test_permutation_invariant(p, gamma, seed):
    p = np.asarray(p)
    q = np.random.default_rng(seed).permutation(p)
    assert qppa_fixed(q, gamma).p_value == qppa_fixed(p, gamma).p_value
    assert qppa_gamma_min(q, 0.1).p_value == qppa_gamma_min(p, 0.1).p_value


@settings(max_examples=200, deadline=None)
@given(p=pvec, gamma_min=st.floats(0.01, 0.9))
def test_gamma_min_dominance(p, gamma_min):
    p = np.asarray(p)
    adaptive = qppa_gamma_min(p, gamma_min).p_value
    penalty = 1 - math.log(gamma_min)
    for g in np.linspace(gamma_min, 1, 40)[1:-1]:
        assert adaptive <= min(1.0, penalty * qppa_fixed(p, g).p_value) + 1e-12


@pytest.mark.parametrize("rho", [0.0, 0.9])
@pytest.mark.parametrize("gamma", [0.1, 0.5, 0.9])
def test_type_one_bound(rho, gamma):
    rng = np.random.default_rng(11)
    R, N = 10_000, 30
    z = math.sqrt(rho) * rng.standard_normal((R, 1)) + math.sqrt(1 - rho) * rng.standard_normal((R, N))
    p = stats.norm.cdf(z)
    rate = np.mean([qppa_fixed(row, gamma).p_value <= 0.05 for row in p])
    assert rate <= 0.06
