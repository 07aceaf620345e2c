import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from econgeom import money as mn
from econgeom._ext import compiled_kernels, python_kernels
from econgeom.errors import DomainError, FitError, InfeasibleError, NormalizationError, SupportError
from econgeom.manifold import fisher_metric_numeric
from econgeom.quadrature import hermite, laguerre, trapezoid

RS = mn.ExchangeRule("random_split")


def test_init_rules():
    e = mn.init_ensemble(3, 1.0)
    assert e.holdings.tolist() == [34, 33, 33] and e.total == pytest.approx(1.0)
    e = mn.init_ensemble(4, 10.0, "all_to_one")
    assert e.holdings.tolist() == [1000, 0, 0, 0]
    assert mn.temperature(e) == pytest.approx(2.5)
    for bad in ((1, 5.0), (3, -1.0), (3, 0.001), (2.5, 1.0)):
        with pytest.raises(DomainError):
            mn.init_ensemble(*bad)
    with pytest.raises(DomainError):
        mn.init_ensemble(3, 1.0, "random")


def test_ensemble_is_immutable_copy():
    h = np.array([5, 5], dtype=np.int64)
    e = mn.AgentEnsemble(h)
    h[0] = 0
    assert e.holdings[0] == 5
    with pytest.raises(ValueError):
        e.holdings[0] = 1
    with pytest.raises(DomainError):
        mn.AgentEnsemble(np.array([-1, 3]))


def test_forced_random_split_outcomes():
    e = mn.AgentEnsemble(np.array([300, 100, 7]))
    assert mn.exchange_step(e, RS, pair=(0, 1), u=0.0).holdings.tolist() == [0, 400, 7]
    assert mn.exchange_step(e, RS, pair=(0, 1), u=0.999999).holdings.tolist() == [400, 0, 7]
    assert mn.exchange_step(e, RS, pair=(0, 1), u=0.5).holdings.tolist() == [200, 200, 7]
    with pytest.raises(DomainError):
        mn.exchange_step(e, RS, pair=(1, 1))


def test_fixed_delta_respects_budget():
    rule = mn.ExchangeRule("fixed_delta", 1.0)
    e = mn.AgentEnsemble(np.array([50, 0]))
    assert mn.exchange_step(e, rule, pair=(0, 1)).holdings.tolist() == [50, 0]
    e = mn.AgentEnsemble(np.array([150, 0]))
    assert mn.exchange_step(e, rule, pair=(0, 1)).holdings.tolist() == [50, 100]
    with pytest.raises(DomainError):
        mn.ExchangeRule("fixed_delta", 0.0)
    with pytest.raises(DomainError):
        mn.ExchangeRule("gift")


@pytest.mark.skipif(compiled_kernels is None, reason="compiled kernels not built")
@pytest.mark.parametrize("rule", [RS, mn.ExchangeRule("fixed_delta", 0.5)])
def test_kernel_parity(rule):
    e = mn.init_ensemble(200, 1000.0, "all_to_one", seed=3)
    a = mn.run_exchange(e, 50_000, rule, 10_000, kernels=compiled_kernels)
    b = mn.run_exchange(e, 50_000, rule, 10_000, kernels=python_kernels)
    assert np.array_equal(a.final.holdings, b.final.holdings)
    for ha, hb in zip(a.histograms, b.histograms):
        assert np.array_equal(ha.counts, hb.counts)


def test_run_exchange_reproducible_and_conservative():
    e = mn.init_ensemble(100, 500.0, seed=11)
    a = mn.run_exchange(e, 20_000, RS, 5_000)
    b = mn.run_exchange(e, 20_000, RS, 5_000)
    assert np.array_equal(a.final.holdings, b.final.holdings)
    assert a.steps == [0, 5000, 10000, 15000, 20000]
    assert a.final.total_quanta == e.total_quanta
    c = mn.run_exchange(mn.init_ensemble(100, 500.0, seed=12), 20_000, RS, 5_000)
    assert not np.array_equal(a.final.holdings, c.final.holdings)
    z = mn.run_exchange(e, 0, RS)
    assert np.array_equal(z.final.holdings, e.holdings) and len(z.histograms) == 1


def test_histogram_and_merge():
    e = mn.AgentEnsemble(np.array([0, 50, 150, 999]))
    edges = np.array([0.0, 1.0, 2.0, 10.0 + 0.01])
    h = mn.histogram(e, edges)
    assert h.counts.tolist() == [2, 1, 1] and h.mean == pytest.approx(e.total / 4)
    m = mn.merge_histograms([h, h])
    assert m.counts.tolist() == [4, 2, 2] and m.total_count == 8
    with pytest.raises(DomainError):
        mn.histogram(e, np.array([0.0, 1.0]))
    with pytest.raises(FitError):
        mn.merge_histograms([])


def test_bg_density():
    assert mn.bg_pdf(0.0, 5.0) == pytest.approx(0.2)
    assert mn.bg_cdf(5.0, 5.0) == pytest.approx(1 - np.exp(-1))
    with pytest.raises(DomainError):
        mn.bg_pdf(1.0, 0.0)
    with pytest.raises(DomainError):
        mn.bg_pdf(-1.0, 1.0)


def test_fit_exponential_on_exponential_sample():
    rng = np.random.default_rng(5)
    cents = np.round(rng.exponential(5.0, 200_000) * 100).astype(np.int64)
    e = mn.AgentEnsemble(cents)
    fit = mn.fit_exponential(mn.histogram(e, mn.default_edges(e)))
    assert fit.T_hat == pytest.approx(5.0, rel=0.01)
    assert fit.ks_statistic < 0.01
    assert fit.p_below_T == pytest.approx(1 - np.exp(-1), abs=0.01)


def test_fit_exponential_errors():
    e = mn.init_ensemble(10, 10.0)
    with pytest.raises(FitError):
        mn.fit_exponential(mn.histogram(e))


def test_gibbs_entropy_of_exponential():
    T = 5.0
    edges = np.linspace(0, 200, 20001)
    p = np.diff(mn.bg_cdf(edges, T))
    c = np.round(p * 1e9).astype(np.int64)
    h = mn.Histogram(edges, c, int(c.sum()))
    assert mn.gibbs_entropy(h) == pytest.approx(1 + np.log(T), abs=1e-4)


def test_coupling_conserves_and_equalizes():
    e1 = mn.init_ensemble(100, 200.0, seed=1)
    e2 = mn.init_ensemble(100, 800.0, seed=2)
    res = mn.couple_and_equilibrate(e1, e2, 200_000, RS, 2_000, seed=9)
    totals = res.T1 * 100 + res.T2 * 100
    np.testing.assert_allclose(totals, 1000.0, atol=1e-9)
    a, b = res.equilibrium()
    assert abs(a - 5) < 0.5 and abs(b - 5) < 0.5
    assert res.rows().shape == (len(res.steps), 3)


# --- relative entropy ----------------------------------------------------------


def test_kl_exponentials():
    T1, T2 = 2.0, 5.0
    kl = mn.relative_entropy(lambda x: mn.bg_pdf(x, T1), lambda x: mn.bg_pdf(x, T2), laguerre(128, 0.0, 2.0))
    assert kl == pytest.approx(np.log(T2 / T1) + T1 / T2 - 1, abs=1e-10)


def test_kl_gaussians():
    def gauss(m, s):
        return lambda x: np.exp(-0.5 * ((x - m) / s) ** 2) / (s * np.sqrt(2 * np.pi))

    kl = mn.relative_entropy(gauss(0.3, 1.2), gauss(-0.5, 2.0), hermite(96, 0.3, 1.2))
    expected = np.log(2.0 / 1.2) + (1.2 ** 2 + 0.8 ** 2) / (2 * 4.0) - 0.5
    assert kl == pytest.approx(expected, abs=1e-10)
    assert mn.relative_entropy(gauss(0, 1), gauss(0, 1), hermite(32)) == 0.0


def test_kl_errors():
    uniform = lambda x: np.where((x >= 0) & (x <= 1), 1.0, 0.0)
    ramp = lambda x: 2 * x  # vanishes at 0 where the uniform density does not
    with pytest.raises(SupportError):
        mn.relative_entropy(uniform, ramp, trapezoid(0, 1, 2001))
    with pytest.raises(NormalizationError):
        mn.relative_entropy(lambda x: 2 * uniform(x), uniform, trapezoid(0, 1, 2001))


# --- maximum entropy -----------------------------------------------------------


def test_maxent_mean_constraint_gives_exponential():
    prob = mn.MaxEntProblem(lambda x: np.ones_like(x), [lambda x: x], [5.0])
    res = mn.maxent_fit(prob, laguerre(96, 0.0, 1.0))
    assert res.lambdas[0] == pytest.approx(0.2, abs=1e-8)
    assert res.log_z == pytest.approx(np.log(5.0), abs=1e-8)
    xs = np.linspace(0, 40, 9)
    np.testing.assert_allclose(res.pdf(xs), mn.bg_pdf(xs, 5.0), rtol=1e-8)


def test_maxent_two_moments_gives_gaussian():
    prob = mn.MaxEntProblem(lambda x: np.ones_like(x), [lambda x: x, lambda x: x * x], [0.0, 1.0],
                            (-np.inf, np.inf))
    res = mn.maxent_fit(prob, hermite(64, 0.0, 1.5))
    np.testing.assert_allclose(res.lambdas, [0.0, 0.5], atol=1e-9)


def test_maxent_infeasible():
    prob = mn.MaxEntProblem(lambda x: np.ones_like(x), [lambda x: x], [-1.0])
    with pytest.raises(InfeasibleError):
        mn.maxent_fit(prob, laguerre(64))
    with pytest.raises(DomainError):
        mn.MaxEntProblem(lambda x: x, [], [])
    with pytest.raises(SupportError):
        mn.maxent_fit(prob, hermite(16))


def test_maxent_family_fisher_metric_is_variance():
    # in natural parameters the Fisher metric equals Var[x] = T^2
    prob = mn.MaxEntProblem(lambda x: np.ones_like(x), [lambda x: x], [5.0])
    quad = laguerre(96, 0.0, 1.0)
    res = mn.maxent_fit(prob, quad)
    g = fisher_metric_numeric(res.as_density(quad), res.lambdas)
    assert g[0, 0] == pytest.approx(25.0, rel=1e-5)


# --- properties ----------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 10_000), min_size=2, max_size=40), st.integers(0, 2 ** 63),
       st.sampled_from(["random_split", "fixed_delta"]))
def test_exchange_conserves_money(holdings, seed, kind):
    e = mn.AgentEnsemble(np.array(holdings), rng_seed=seed)
    rule = mn.ExchangeRule(kind, 0.37)
    res = mn.run_exchange(e, 500, rule, 100, edges=np.array([0.0, e.total + 1.0]))
    assert res.final.total_quanta == e.total_quanta
    assert np.all(res.final.holdings >= 0)
    for h in res.histograms:
        assert h.total_count == e.N


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 10_000), min_size=2, max_size=20), st.floats(0, 1, exclude_max=True),
       st.data())
def test_single_exchange_conserves_pair(holdings, u, data):
    e = mn.AgentEnsemble(np.array(holdings))
    i = data.draw(st.integers(0, e.N - 1))
    j = data.draw(st.integers(0, e.N - 1).filter(lambda k: k != i))
    out = mn.exchange_step(e, RS, pair=(i, j), u=u).holdings
    assert out[i] + out[j] == e.holdings[i] + e.holdings[j]
    assert np.all(np.delete(out, [i, j]) == np.delete(e.holdings, [i, j]))
