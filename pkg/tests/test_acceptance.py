"""Acceptance criteria 1-10.

Each criterion prints one ``criterion N: PASS/FAIL`` line. Run with pytest, or
directly as ``python tests/test_acceptance.py [N ...]`` for the lines alone.
"""

import contextlib
import io
import json
import math
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import earuntime
from earuntime import asymptotics, cli, distributions as D, moments, simulator, specfun
from earuntime.exactnum import Polynomial as P, RationalFunction
from earuntime.transition import lam
from golden import C1_MAGNITUDE, C2, D_ROWS, D_TILDE_ROWS, PHI, PSI, REFLECTION, S0_HALF

RESULTS = {}
REPLICATES = 10 ** 5


def _cold():
    """Drop memoized tables so runtimes are measured from scratch."""
    for mod in (earuntime.exactnum, earuntime.transition, moments, specfun, asymptotics, D):
        for obj in vars(mod).values():
            if callable(getattr(obj, "cache_clear", None)):
                obj.cache_clear()


def _record(k, ok, detail):
    RESULTS[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    return bool(ok)


def _cli_json(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.main(list(argv))
    return code, json.loads(buf.getvalue())


# ---------------------------------------------------------------------------


def criterion_1():
    _cold()
    t0 = time.perf_counter()
    expected = {
        ("mu", 2): RationalFunction(P([-1, 1, 3]), P([-1, 2, 2])),
        ("mu", 3): RationalFunction(P([-6, 15, 14, -42, -19, 40, 22]), P([-1, 2, 2]) * P([6, -9, -7, 12, 6])),
        ("v", 2): RationalFunction(P([1, -4, -1, 8, 5]), P([-1, 2, 2]) ** 2),
    }
    bad = []
    for (kind, m), f in expected.items():
        code, doc = _cli_json("exact", "symbolic", "--m", str(m), "--kind", kind)
        got = doc["functions"][0]
        num, den = f.integer_form()
        if code or got["numerator_coefficients"] != [str(c) for c in num.coeffs] \
                or got["denominator_coefficients"] != [str(c) for c in den.coeffs]:
            bad.append(f"{kind}{m}")
        fn = moments.mu_star if kind == "mu" else moments.V_star
        if fn(mode="symbolic_n", m_max=m)[m] != f:
            bad.append(f"{kind}{m}-object")
    dt = time.perf_counter() - t0
    return _record(1, not bad and dt < 5, f"mu*_2, mu*_3, V*_2 coefficientwise {'exact' if not bad else bad}; {dt:.2f}s (< 5s)")


def criterion_2():
    _cold()
    t0 = time.perf_counter()
    bad = []
    for k, gold in PHI.items():
        if specfun.phi_series(k, len(gold) + 1).plain()[:len(gold)] != gold:
            bad.append(f"phi{k}")
    for k, gold in PSI.items():
        if specfun.psi_series(k, len(gold) + 1).plain()[:len(gold)] != gold:
            bad.append(f"psi{k}")
    dt = time.perf_counter() - t0
    n = sum(len(g) for g in PHI.values()) + sum(len(g) for g in PSI.values())
    return _record(2, not bad and dt < 10, f"{n} rational Taylor coefficients of phi1-3, psi1-2 "
                   f"{'exact' if not bad else 'mismatch ' + str(bad)}; {dt:.2f}s (< 10s)")


def criterion_3():
    c1, c2 = specfun.c1(), specfun.c2()
    ref = specfun.reference_constants()
    s0 = specfun.S(0, 0.5)
    formula = -math.e * (math.log(2) - specfun.euler_gamma() - specfun.phi(1, 0.5))
    checks = {
        "c2 vs 0.59789875": abs(c2 - C2) <= 1e-6,
        "c2 vs quadrature": abs(c2 - ref["c2"]) <= 1e-6,
        "|c1| digits": abs(abs(c1) - C1_MAGNITUDE) <= 1e-10,
        "c1 vs formula": abs(c1 - formula) <= 1e-10 and abs(c1 - ref["c1"]) <= 1e-10,
        "c1 sign": c1 < 0,
        "S0(1/2)": abs(s0 - S0_HALF) <= 1e-5,
    }
    failed = [k for k, v in checks.items() if not v]
    return _record(3, not failed, f"c1={c1:.16f} (negative, |c1| matches), c2={c2:.10f}, "
                   f"S0(1/2)={s0:.8f}" + (f"; failed {failed}" if failed else ""))


def criterion_4():
    t0 = time.perf_counter()
    grid = [0.1 * k for k in range(1, 10)]
    worst_id, worst_d = 0.0, 0.0
    h = 1e-5
    for a in grid:
        for r, (sign, poly) in REFLECTION.items():
            lhs = specfun.S(r, a) + sign * specfun.S(r, 1 - a)
            worst_id = max(worst_id, abs(lhs - math.e * np.polyval(poly[::-1], a)))
        i0, i1 = specfun.bessel_bar("I0bar", a), specfun.bessel_bar("I1bar", a)
        worst_id = max(worst_id, abs(specfun.S(1, a) - ((2 * a - 1) * specfun.S(0, a) + a * i0 + (1 - a) * i1)))
        for r in range(2, 5):
            rhs = a * i0 + sum(math.comb(r - 1, j) * specfun.S(j, a) * (a + (-1) ** (r - j) * (1 - a))
                               for j in range(r))
            worst_id = max(worst_id, abs(specfun.S(r, a) - rhs))
        fd0 = (specfun.S(0, a + h) - specfun.S(0, a - h)) / (2 * h)
        worst_d = max(worst_d, abs(i0 + i1 - fd0), abs(specfun.S_derivative(0, a) - fd0))
        fd1 = (specfun.S(1, a + h) - specfun.S(1, a - h)) / (2 * h)
        worst_d = max(worst_d, abs(i0 + 2 * specfun.S(0, a) - fd1))
    dt = time.perf_counter() - t0
    ok = worst_id <= 1e-10 and worst_d <= 1e-6 and dt < 5
    return _record(4, ok, f"reflection r=1..4, Bessel recurrence r=1..4 at 9 points: max err {worst_id:.1e} "
                   f"(<= 1e-10); derivatives vs FD {worst_d:.1e} (<= 1e-6); {dt:.2f}s (< 5s)")


def criterion_5():
    _cold()
    t0 = time.perf_counter()
    ns = range(10, 51)
    mu = asymptotics.residual_report("mu_star", 1, ns)
    V = asymptotics.residual_report("V_star", 2, ns, m_min=2)
    dt = time.perf_counter() - t0
    ok = mu.verdict and V.verdict and dt < 120
    detail = []
    for name, rep in (("mu* K=1", mu), ("V* K=2", V)):
        mx = rep.max_by_n()
        detail.append(f"{name}: C={rep.fitted_constant:.3f}, max={max(mx.values()):.3f} "
                      f"(<= {rep.band * rep.fitted_constant:.3f})")
    return _record(5, ok, "; ".join(detail) + f"; {dt:.1f}s (< 120s)")


def criterion_6():
    _cold()
    t0 = time.perf_counter()
    bad = []
    for target, gold, rep in (("d", D_ROWS, asymptotics.fit_dk("mu_star", 4, 14)),
                              ("d~", D_TILDE_ROWS, asymptotics.fit_dk("V_star", 4, 14))):
        for k, (coeffs, valid_from, corrections) in gold.items():
            row = rep[k]
            got = {n: c for n, c in row.coefficients.items() if c}
            if got != coeffs or row.valid_from != valid_from:
                bad.append(f"{target}{k}")
            if corrections is not None and row.corrections != corrections:
                bad.append(f"{target}{k} corrections")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    return _record(6, ok, f"d_0..d_4 and d~_1..d~_4 rows, thresholds and [m=0], [m=1] corrections "
                   f"{'exact' if not bad else 'mismatch ' + str(bad)}; {dt:.2f}s (< 30s)")


def criterion_7():
    worst = 0.0
    for n, m in ((5, 3), (6, 6), (8, 4)):
        par = moments.LeadingOnesParams(n, 1 / n)
        for t in (0.1, 0.3, 0.5, 0.7, 0.9):
            vals = [D.leadingones_pgf(par, m, t, k) for k in ("recurrence", "product", "convolution")]
            worst = max(worst, max(vals) - min(vals))
    # closed forms vs convolution moments, from the exact PGF in t = 1 + s
    from earuntime.exactnum import TruncatedSeries
    mom_ok = True
    for n, m, p in ((6, 4, F(1, 6)), (8, 8, F(1, 8)), (5, 3, F(1, 3))):
        par = moments.LeadingOnesParams(n, p)
        s = TruncatedSeries.polynomial([F(1), F(1)], 3, variable="s")
        g = D.leadingones_pgf(par, m, s)
        mean, fact2 = g[1], 2 * g[2]
        mo = moments.leadingones_moments(par, m)
        mom_ok &= mo.mean == mean and mo.variance == fact2 + mean - mean * mean
    par = moments.LeadingOnesParams(12, F(1, 12))
    nu, var = moments.leadingones_random_start(par)
    w = [F(1, 2 ** (12 + 1 - m)) for m in range(1, 13)]
    mos = [moments.leadingones_moments(par, m) for m in range(1, 13)]
    mix_mean = sum(a * mo.mean for a, mo in zip(w, mos))
    mix_var = sum(a * (mo.variance + mo.mean ** 2) for a, mo in zip(w, mos)) - mix_mean ** 2
    mix_ok = nu == mix_mean and var == mix_var
    ok = worst <= 1e-10 and mom_ok and mix_ok
    return _record(7, ok, f"PGF spread {worst:.1e} (<= 1e-10) over 15 points; closed-form moments == PGF "
                   f"moments exactly: {mom_ok}; nu_12, var_12 == 2^(m-n-1) mixture exactly: {mix_ok}")


def _ks_sim(cfg, law, center, scale):
    summ = simulator.run_batch(cfg)
    return D.ks_distance(simulator.empirical_cdf(summ), law, center, scale)


def criterion_8():
    t0 = time.perf_counter()
    a = {}
    for j in range(1, 5):
        law = D.LimitLaw("sum_of_exponentials", 2 * j)
        cfg = simulator.SimulationConfig(50, m=2 * j, replicates=REPLICATES, seed=800 + j)
        a[j] = _ks_sim(cfg, law, *D.normalization(law, 50, m=2 * j))
    b = {}
    gumbel = D.LimitLaw("gumbel")
    for n in (20, 35, 70):
        cfg = simulator.SimulationConfig(n, start="uniform", replicates=REPLICATES, seed=850 + n)
        b[n] = _ks_sim(cfg, gumbel, *D.normalization(gumbel, n, rho=0.5))
    n = 200
    par = moments.LeadingOnesParams(n, 1 / n)
    mo = moments.leadingones_moments(par, n)
    normal = D.LimitLaw("normal")
    cfg = simulator.SimulationConfig(n, "leadingones", m=n, replicates=REPLICATES, seed=890, engine="chain")
    c = _ks_sim(cfg, normal, *D.normalization(normal, n, mean=mo.mean, sd=math.sqrt(mo.variance)))
    dt = time.perf_counter() - t0
    # the exact law at the same n separates finite-n bias from sampling noise
    exact_a = {j: D.ks_distance(D.onemax_exact_cdf(50, 2 * j), D.LimitLaw("sum_of_exponentials", 2 * j),
                                0.0, math.e * 50) for j in a}
    ok_a = all(v < 0.05 for v in a.values())
    ok_b = b[35] < 0.08 and b[70] < b[20]
    ok_c = c < 0.05
    ok = ok_a and ok_b and ok_c and dt < 600
    da = ", ".join(f"m={2 * j}: {v:.4f} [exact law {exact_a[j]:.4f}]" for j, v in a.items())
    return _record(8, ok, f"(a) n=50 {da} (< 0.05); (b) Gumbel n=20 {b[20]:.4f}, n=35 {b[35]:.4f} (< 0.08), "
                   f"n=70 {b[70]:.4f} (< n=20); (c) LeadingOnes n=200 normal {c:.4f} (< 0.05); "
                   f"{REPLICATES} replicates each; {dt:.0f}s (< 600s)")


def criterion_9():
    trials = 10 ** 6
    worst = 0.0
    om = simulator.transition_frequencies(20, 10, "onemax", trials, seed=901)
    for ell in range(0, 11):
        prob = 1 - float(sum(lam(20, 10, k) for k in range(1, 11))) if ell == 0 else float(lam(20, 10, ell))
        se = max(om.standard_error(prob), 1 / trials)
        worst = max(worst, abs(om.frequency(ell) - prob) / se)
    n, m = 20, 10
    lo = simulator.transition_frequencies(n, m, "leadingones", trials, seed=902)
    p, q = 1 / n, 1 - 1 / n
    for ell in range(1, m + 1):
        prob = p * q ** (n - m) * 2.0 ** (-ell + (1 if ell == m else 0))
        se = max(lo.standard_error(prob), 1 / trials)
        worst = max(worst, abs(lo.frequency(ell) - prob) / se)
    return _record(9, worst <= 4, f"OneMax (20,10) l=0..10 and LeadingOnes (20,10) l=1..10 from "
                   f"{trials} bitwise steps each: max |z| = {worst:.2f} (<= 4)")


def criterion_10():
    for k, fn in ((5, criterion_5), (8, criterion_8)):
        if k not in RESULTS:
            fn()
    ok = RESULTS[5][0] and RESULTS[8][0]
    return _record(10, ok, "uniform O-bounds checked as fitted-constant boundedness (criterion 5); "
                   "n -> oo limit laws checked as KS thresholds and a decreasing KS trend (criterion 8)")


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 11)}


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6, 7, 9])
def test_criterion(k):
    assert CRITERIA[k](), RESULTS[k][1]


@pytest.mark.slow
def test_criterion_8():
    assert criterion_8(), RESULTS[8][1]


@pytest.mark.slow
def test_criterion_10():
    assert criterion_10(), RESULTS[10][1]


if __name__ == "__main__":
    wanted = [int(a) for a in sys.argv[1:]] or list(CRITERIA)
    results = [CRITERIA[k]() for k in wanted]
    sys.exit(0 if all(results) else 1)
