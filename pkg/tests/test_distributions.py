import io
import json
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from earuntime.distributions import (
    BudgetExceeded, DiscreteCdf, KSReport, LimitLaw, ks_distance, leadingones_exact_cdf,
    leadingones_pgf, limit_cdf, normalization, onemax_exact_cdf, onemax_mixed_cdf,
    onemax_pgf_moments,
)
from earuntime.moments import (
    LeadingOnesParams, leadingones_moments, mean_onemax, onemax_moments, random_start_moments,
)
from earuntime.transition import lam


def test_geometric_m1_exact():
    n = 5
    rho = lam(n, 1, 1)
    cdf = onemax_exact_cdf(n, 1, t_max=50, exact=True)
    pmf = cdf.pmf()
    assert pmf[0] == 0
    for k in range(1, 51):
        assert pmf[k] == rho * (1 - rho) ** (k - 1)


def test_tail_sum_mean():
    cdf = onemax_exact_cdf(8, 4)
    assert cdf.mean() == pytest.approx(float(mean_onemax(8, 4)), abs=1e-9)


def test_tail_mass_bound():
    n, m, t = 10, 3, 400
    cdf = onemax_exact_cdf(n, m, t_max=t)
    assert cdf.tail_mass <= m * (1 - 1 / (math.e * n)) ** t


@pytest.mark.parametrize("n", [3, 6, 10])
def test_pgf_moments_exact(n):
    means, variances = onemax_moments(n)
    for m in range(n + 1):
        assert onemax_pgf_moments(n, m) == (means[m], variances[m])


def test_mixed_cdf():
    n, rho = 8, F(1, 2)
    cdf = onemax_mixed_cdf(n, rho, t_max=30, exact=True)
    assert cdf(0) == (1 - rho) ** n
    fl = onemax_mixed_cdf(n, 0.5)
    assert fl.mean() == pytest.approx(float(random_start_moments(n, rho)[0]), abs=1e-9)


def test_stochastic_dominance():
    lo, hi = onemax_mixed_cdf(8, 0.25), onemax_mixed_cdf(8, 0.75)
    assert np.all(lo.values >= hi.values - 1e-15)


def test_budget():
    with pytest.raises(BudgetExceeded):
        onemax_exact_cdf(50, 50, t_max=10 ** 7)


@given(st.integers(2, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))))
def test_cdfs_nondecreasing(nm):
    n, m = nm
    assert onemax_exact_cdf(n, m).is_nondecreasing()
    assert leadingones_exact_cdf(LeadingOnesParams(n, 1 / n), m).is_nondecreasing()


def test_discrete_cdf_eval_and_csv():
    cdf = DiscreteCdf([F(1, 4), F(1, 2), F(1)], offset=2, exact=True)
    assert cdf(1) == 0 and cdf(2.5) == F(1, 4) and cdf(10) == 1
    assert cdf.mean() == 2 + F(3, 4) + F(1, 2)
    buf = io.StringIO()
    cdf.to_csv(buf)
    assert buf.getvalue().splitlines()[1] == "2,1/4"


# -- LeadingOnes ------------------------------------------------------------


def test_lo_m1_geometric():
    par = LeadingOnesParams(6, F(1, 6))
    P1 = par.p * par.q ** 5
    t = F(9, 10)
    assert leadingones_pgf(par, 1, t) == P1 * t / (1 - (1 - P1) * t)


@pytest.mark.parametrize("n, m", [(5, 3), (6, 6), (8, 4)])
def test_lo_three_representations(n, m):
    par = LeadingOnesParams(n, 1 / n)
    for t in (0.1, 0.3, 0.5, 0.7, 0.9):
        rec = leadingones_pgf(par, m, t, "recurrence")
        prod = leadingones_pgf(par, m, t, "product")
        conv = leadingones_pgf(par, m, t, "convolution")
        assert abs(rec - conv) < 1e-10 and abs(prod - conv) < 1e-10


def test_lo_representations_exact():
    par = LeadingOnesParams(6, F(1, 6))
    t = F(9, 10)
    vals = {leadingones_pgf(par, 3, t, k) for k in ("recurrence", "product", "convolution")}
    assert len(vals) == 1
    with pytest.raises(ValueError):
        leadingones_pgf(par, 3, t, "laplace")


def test_lo_cdf_moments():
    par = LeadingOnesParams(6, F(1, 6))
    cdf = leadingones_exact_cdf(par, 4, exact=False)
    mo = leadingones_moments(par, 4)
    assert cdf.mean() == pytest.approx(float(mo.mean), rel=1e-9)
    assert cdf.variance() == pytest.approx(float(mo.variance), rel=1e-7)


def test_lo_exact_cdf_matches_float():
    par = LeadingOnesParams(5, F(1, 5))
    ex = leadingones_exact_cdf(par, 3, t_max=60, exact=True)
    fl = leadingones_exact_cdf(LeadingOnesParams(5, 0.2), 3, t_max=60)
    assert np.allclose([float(v) for v in ex.values], fl.values, atol=1e-13)


# -- limit laws ---------------------------------------------------------------


def test_limit_law_examples():
    assert limit_cdf(LimitLaw("gumbel"), 0.0) == pytest.approx(math.exp(-1))
    assert limit_cdf(LimitLaw("sum_of_exponentials", 2), math.log(2)) == pytest.approx(0.25)
    xs = np.linspace(0, 6, 13)
    assert np.allclose(limit_cdf(LimitLaw("gamma_mixture", 1), xs), 1 - np.exp(-xs))
    assert limit_cdf(LimitLaw("normal"), 0.0) == 0.5
    with pytest.raises(ValueError):
        LimitLaw("cauchy")
    with pytest.raises(ValueError):
        LimitLaw("gamma_mixture")


@given(st.integers(1, 8), st.floats(0, 30))
def test_gamma_mixture_poisson_form(m, x):
    # finite Poisson sum for the integer-shape gamma CDF
    def P(k):
        return 1 - sum(math.exp(-x) * x ** i / math.factorial(i) for i in range(k))
    ref = sum(math.comb(m - 1, j) * P(j + 1) for j in range(m)) / 2 ** (m - 1)
    assert limit_cdf(LimitLaw("gamma_mixture", m), x) == pytest.approx(ref, abs=1e-12)


def test_gumbel_moments():
    pdf = lambda x: math.exp(-x - math.exp(-x))
    # pdf is below 1e-900 outside [-7, 80]
    quad = lambda f: integrate.quad(f, -7, 80, epsabs=1e-13, epsrel=1e-13, limit=200, points=[0])[0]
    mean = quad(lambda x: x * pdf(x))
    var = quad(lambda x: (x - mean) ** 2 * pdf(x))
    assert mean == pytest.approx(np.euler_gamma, abs=1e-8)
    assert var == pytest.approx(math.pi ** 2 / 6, abs=1e-8)


def test_ks_degenerate():
    law = LimitLaw("gumbel")
    assert ks_distance(law, law) == 0.0
    pt = np.full(500, 3.0)
    cdf = DiscreteCdf(np.concatenate([np.zeros(3), np.ones(1)]))
    assert ks_distance(pt, LimitLaw("normal"), center=3.0, scale=1e-9) == pytest.approx(0.5)
    assert cdf(3) == 1.0 and cdf(2) == 0.0


def test_ks_matches_scipy_for_continuous_sample():
    rng = np.random.default_rng(3)
    x = rng.gumbel(size=2000)
    ours = ks_distance(x, LimitLaw("gumbel"))
    ref = stats.kstest(x, stats.gumbel_r.cdf).statistic
    assert ours == pytest.approx(ref, abs=1e-12)


def test_ks_counts_tail_mass():
    cdf = DiscreteCdf([0.2, 0.5])
    assert ks_distance(cdf, LimitLaw("normal"), center=100.0) >= 0.5


def test_gumbel_convergence_exact():
    ks = []
    for n in (20, 60):
        cdf = onemax_exact_cdf(n, n)
        center, scale = normalization(LimitLaw("gumbel"), n, m=n)
        ks.append(ks_distance(cdf, LimitLaw("gumbel"), center, scale))
    assert ks[1] < ks[0]


def test_leadingones_normal_exact():
    n = 200
    par = LeadingOnesParams(n, 1 / n)
    mo = leadingones_moments(par, n)
    cdf = leadingones_exact_cdf(par, n)
    law = LimitLaw("normal")
    c, s = normalization(law, n, mean=mo.mean, sd=math.sqrt(mo.variance))
    assert ks_distance(cdf, law, c, s) < 0.05


def test_normalization_errors_and_report():
    with pytest.raises(ValueError):
        normalization(LimitLaw("gumbel"), 10)
    with pytest.raises(ValueError):
        normalization(LimitLaw("normal"), 10)
    c, s = normalization(LimitLaw("gamma_mixture", 3), 10, c=1.0)
    assert c == 0 and s == pytest.approx(10 * math.e)
    rep = KSReport("gumbel", 10, None, {"center": 1.0, "scale": 2.0}, 0.1, 100)
    assert json.loads(rep.to_json())["schema_version"] == 1


@pytest.mark.parametrize("m", [2, 6, 8])
def test_sum_of_exponentials_rate(m):
    # the distance to the fixed-m limit is O(m/n): doubling n halves it
    law = LimitLaw("sum_of_exponentials", m)
    ks = [ks_distance(onemax_exact_cdf(n, m), law, 0.0, math.e * n) for n in (50, 100, 200)]
    for a, b in zip(ks, ks[1:]):
        assert 0.45 < b / a < 0.55
    assert ks[0] * 50 / m < 0.5
