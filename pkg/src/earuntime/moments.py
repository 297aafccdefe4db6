"""Exact first and second moments of the optimization time.

OneMax
------
The normalized mean ``mu*_{n,m} = (e_n/n) mu_{n+1,m}`` solves

    sum_l lambda*_{n,m,l} (mu*_{n,m} - mu*_{n,m-l}) = 1/n,    mu*_{n,0} = 0,

and the normalized second-order quantity ``V*_{n,m} = e_n^2 (sigma^2_{n+1,m}
+ mu_{n+1,m}) / n^2`` solves the same recurrence with right-hand side
``T*_{n,m} = sum_l lambda*_{n,m,l} (mu*_{n,m} - mu*_{n,m-l})^2``.

Each recurrence is solved three ways: for a concrete ``n`` (exact or float),
as rational functions of ``n`` for small ``m``, and as power series in
``u = 1/n`` (the expansion at ``n = oo`` for fixed ``m``).

LeadingOnes
-----------
Closed forms for the first four moments of ``Y_{n,m}`` under mutation rate
``p``, and for the uniform random start.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import TextIO

from .exactnum import Polynomial, RationalFunction, TruncatedSeries, as_rational
from .transition import e_n, lam, lambda_star

__all__ = [
    "harmonic",
    "MomentTable",
    "mu_star",
    "V_star",
    "mu_star_laurent",
    "V_star_laurent",
    "from_normalized_mean",
    "from_normalized_variance",
    "onemax_moments",
    "onemax_moments_direct",
    "mean_onemax",
    "variance_onemax",
    "MixtureWeights",
    "mixture_weights",
    "random_start_moments",
    "LeadingOnesParams",
    "LeadingOnesMoments",
    "leadingones_moments",
    "leadingones_second_moment",
    "leadingones_random_start",
    "leadingones_table",
]


def harmonic(m: int, order: int = 1) -> Fraction:
    """``H_m^{(order)} = sum_{j<=m} j^-order``; ``H_0 = 0``."""
    if m < 0:
        raise ValueError("harmonic numbers need m >= 0")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    return _harmonic_cached(m, order)


@lru_cache(maxsize=None)
def _harmonic_cached(m: int, order: int) -> Fraction:
    if m == 0:
        return Fraction(0)
    return _harmonic_cached(m - 1, order) + Fraction(1, m ** order)


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class MomentTable:
    """Values indexed by the deficit ``m = 0 .. len(values) - 1``."""

    n: int
    kind: str
    values: tuple
    exact: bool = True

    def __getitem__(self, m: int):
        return self.values[m]

    def __len__(self):
        return len(self.values)

    def to_csv(self, fh: TextIO) -> None:
        """``n,m,value_numer,value_denom`` (exact) or ``n,m,value`` (float)."""
        w = csv.writer(fh, lineterminator="\n")
        if self.exact:
            w.writerow(["n", "m", "value_numer", "value_denom"])
            for m, v in enumerate(self.values):
                w.writerow([self.n, m, v.numerator, v.denominator])
        else:
            w.writerow(["n", "m", "value"])
            for m, v in enumerate(self.values):
                w.writerow([self.n, m, f"{float(v):.17g}"])


def _kernel_rows(n: int, m_max: int, exact: bool) -> list:
    return [None] + [[lambda_star(n, m, ell, exact) for ell in range(1, m + 1)]
                     for m in range(1, m_max + 1)]


def _solve_tables(n: int, m_max: int, exact: bool, want_variance: bool):
    rows = _kernel_rows(n, m_max, exact)
    zero = Fraction(0) if exact else 0.0
    inv_n = Fraction(1, n) if exact else 1.0 / n
    mu = [zero]
    V = [zero]
    for m in range(1, m_max + 1):
        row = rows[m]
        lbar = sum(row, zero)
        acc = inv_n
        for ell, w in enumerate(row, start=1):
            acc += w * mu[m - ell]
        mu_m = acc / lbar
        mu.append(mu_m)
        if want_variance:
            tstar = zero
            accv = zero
            for ell, w in enumerate(row, start=1):
                dlt = mu_m - mu[m - ell]
                tstar += w * dlt * dlt
                accv += w * V[m - ell]
            V.append((tstar + accv) / lbar)
    return mu, V


def _symbolic_kernel(m: int, ell: int) -> RationalFunction:
    """``lambda*_{n,m,ell}`` as a rational function of ``n``."""
    n = Polynomial([0, 1])
    acc = RationalFunction(Polynomial([0]))
    for j in range(0, m - ell + 1):
        c = math.comb(m, j + ell)
        if c == 0:
            continue
        poly = Polynomial([Fraction(c, math.factorial(j))])
        for i in range(j):
            poly = poly * Polynomial([1 - m - i, 1])
        acc = acc + RationalFunction(poly, n ** (ell + 2 * j))
    return acc


def _symbolic_tables(m_max: int, want_variance: bool):
    if m_max > 8:
        raise ValueError("symbolic mode is limited to m <= 8")
    inv_n = RationalFunction(Polynomial([1]), Polynomial([0, 1]))
    zero = RationalFunction(Polynomial([0]))
    mu = [zero]
    V = [zero]
    for m in range(1, m_max + 1):
        row = [_symbolic_kernel(m, ell) for ell in range(1, m + 1)]
        lbar = zero
        for w in row:
            lbar = lbar + w
        acc = inv_n
        for ell, w in enumerate(row, start=1):
            if not mu[m - ell].numerator.is_zero():
                acc = acc + w * mu[m - ell]
        mu_m = acc / lbar
        mu.append(mu_m)
        if want_variance:
            tstar = zero
            accv = zero
            for ell, w in enumerate(row, start=1):
                dlt = mu_m - mu[m - ell]
                tstar = tstar + w * dlt * dlt
                if not V[m - ell].numerator.is_zero():
                    accv = accv + w * V[m - ell]
            V.append((tstar + accv) / lbar)
    return mu, V


def mu_star(n: int | None = None, mode: str = "exact_numeric", m_max: int | None = None,
            exact: bool = True):
    """Normalized means ``mu*_{n,m}``.

    ``mode="exact_numeric"`` returns a :class:`MomentTable` for ``m = 0..m_max``
    (default ``n``; at most ``n + 1``). ``mode="symbolic_n"`` returns a list of
    :class:`RationalFunction` in ``n`` for ``m = 0..m_max`` (``n`` ignored).
    """
    if mode == "symbolic_n":
        return _symbolic_tables(5 if m_max is None else m_max, False)[0]
    if mode != "exact_numeric":
        raise ValueError(f"unknown mode {mode!r}")
    m_max = n if m_max is None else m_max
    if not 0 <= m_max <= n + 1:
        raise ValueError("m_max must lie in 0..n+1")
    mu, _ = _solve_tables(n, m_max, exact, False)
    return MomentTable(n, "onemax_mu_star", tuple(mu), exact)


def V_star(n: int | None = None, mode: str = "exact_numeric", m_max: int | None = None,
           exact: bool = True):
    """Normalized second-order quantities ``V*_{n,m}``; same conventions as :func:`mu_star`."""
    if mode == "symbolic_n":
        return _symbolic_tables(5 if m_max is None else m_max, True)[1]
    if mode != "exact_numeric":
        raise ValueError(f"unknown mode {mode!r}")
    m_max = n if m_max is None else m_max
    if not 0 <= m_max <= n + 1:
        raise ValueError("m_max must lie in 0..n+1")
    _, V = _solve_tables(n, m_max, exact, True)
    return MomentTable(n, "onemax_V_star", tuple(V), exact)


# ---------------------------------------------------------------------------
# expansions at n = oo for fixed m


def _kernel_u_series(m: int, ell: int, prec: int) -> TruncatedSeries:
    """``lambda*_{n,m,ell}`` as a series in ``u = 1/n`` known modulo ``u**prec``."""
    out = [Fraction(0)] * prec
    for j in range(0, m - ell + 1):
        v = ell + j
        if v >= prec:
            break
        poly = [Fraction(math.comb(m, j + ell), math.factorial(j))]
        for i in range(j):
            a = 1 - m - i
            poly = [x + (a * poly[k - 1] if k else 0) for k, x in enumerate(poly + [Fraction(0)])]
        for k, c in enumerate(poly):
            if v + k < prec:
                out[v + k] += c
    return TruncatedSeries(out, "1/n").normalized()


@lru_cache(maxsize=None)
def _laurent_tables(m_max: int, order: int, want_variance: bool):
    prec = order + 2
    u = TruncatedSeries([Fraction(0), Fraction(1)] + [Fraction(0)] * (prec - 2), "1/n")
    zero = TruncatedSeries([Fraction(0)] * order, "1/n")
    mu = [zero]
    V = [zero]
    for m in range(1, m_max + 1):
        row = [_kernel_u_series(m, ell, prec) for ell in range(1, m + 1)]
        lbar = row[0]
        for w in row[1:]:
            lbar = lbar + w
        acc = u
        for ell, w in enumerate(row, start=1):
            acc = acc + w * mu[m - ell]
        mu_m = (acc.normalized() / lbar).as_power_series().truncate(order)
        mu.append(mu_m)
        if want_variance:
            tstar = None
            accv = None
            for ell, w in enumerate(row, start=1):
                dlt = mu_m - mu[m - ell]
                t = w * dlt * dlt
                tstar = t if tstar is None else tstar + t
                a = w * V[m - ell]
                accv = a if accv is None else accv + a
            V.append(((tstar + accv).normalized() / lbar).as_power_series().truncate(order))
    return tuple(mu), tuple(V)


def mu_star_laurent(m_max: int, order: int = 12) -> tuple:
    """Expansion of ``mu*_{n,m}`` in powers of ``1/n`` for ``m = 0..m_max``.

    Entry ``[m][k]`` is the exact coefficient of ``n**-k``.
    """
    return _laurent_tables(m_max, order, False)[0]


def V_star_laurent(m_max: int, order: int = 12) -> tuple:
    """Expansion of ``V*_{n,m}`` in powers of ``1/n`` for ``m = 0..m_max``."""
    return _laurent_tables(m_max, order, True)[1]


# ---------------------------------------------------------------------------
# un-normalized moments


def from_normalized_mean(n: int, mu_star_value, exact: bool = True):
    """``E(X_{n,m}) = (n-1)/e_{n-1} * mu*_{n-1,m}`` (``n >= 2``)."""
    if n < 2:
        raise ValueError("the normalized table exists for n >= 2 only")
    return (n - 1) / e_n(n - 1, exact) * mu_star_value


def from_normalized_variance(n: int, V_star_value, mean_value, exact: bool = True):
    """``V(X_{n,m}) = (n-1)^2 V*_{n-1,m} / e_{n-1}^2 - E(X_{n,m})`` (``n >= 2``)."""
    if n < 2:
        raise ValueError("the normalized table exists for n >= 2 only")
    en = e_n(n - 1, exact)
    return (n - 1) ** 2 * V_star_value / (en * en) - mean_value


@lru_cache(maxsize=64)
def onemax_moments(n: int, exact: bool = True) -> tuple:
    """``(means, variances)`` of ``X_{n,m}`` for ``m = 0..n`` via the normalized tables."""
    if n == 1:
        one = Fraction(1) if exact else 1.0
        zero = one * 0
        return (zero, one), (zero, zero)
    mu, V = _solve_tables(n - 1, n, exact, True)
    means = tuple(from_normalized_mean(n, v, exact) for v in mu)
    variances = tuple(from_normalized_variance(n, Vv, mv, exact) for Vv, mv in zip(V, means))
    return means, variances


def onemax_moments_direct(n: int, exact: bool = True) -> tuple:
    """Same as :func:`onemax_moments` from the un-normalized kernel recurrences:
    ``sum_l lambda (mu_m - mu_{m-l}) = 1`` and
    ``sum_l lambda (s_m - s_{m-l}) = -1 + sum_l lambda (mu_m - mu_{m-l})^2``."""
    zero = Fraction(0) if exact else 0.0
    mu, s2 = [zero], [zero]
    for m in range(1, n + 1):
        row = [lam(n, m, ell, exact) for ell in range(1, m + 1)]
        tot = sum(row, zero)
        mu_m = (1 + sum((w * mu[m - ell] for ell, w in enumerate(row, 1)), zero)) / tot
        rhs = -1 + sum((w * (mu_m - mu[m - ell]) ** 2 for ell, w in enumerate(row, 1)), zero)
        s2.append((rhs + sum((w * s2[m - ell] for ell, w in enumerate(row, 1)), zero)) / tot)
        mu.append(mu_m)
    return tuple(mu), tuple(s2)


def mean_onemax(n: int, m: int, exact: bool = True):
    """``E(X_{n,m})``."""
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    return onemax_moments(n, exact)[0][m]


def variance_onemax(n: int, m: int, exact: bool = True):
    """``V(X_{n,m})``."""
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    return onemax_moments(n, exact)[1][m]


# ---------------------------------------------------------------------------
# random start


@dataclass(frozen=True)
class MixtureWeights:
    n: int
    rho: object
    weights: tuple


def mixture_weights(n: int, rho, exact: bool = True) -> MixtureWeights:
    """Binomial weights ``pi_{n,m} = C(n,m) rho^m (1-rho)^(n-m)``."""
    r = as_rational(rho) if exact else float(rho)
    if not 0 <= r <= 1:
        raise ValueError("rho must lie in [0, 1]")
    w = tuple(math.comb(n, m) * r ** m * (1 - r) ** (n - m) for m in range(n + 1))
    return MixtureWeights(n, r, w)


def random_start_moments(n: int, rho, exact: bool = True) -> tuple:
    """``(E(X_n), V(X_n))`` when the initial number of zeros is Binomial(n, rho)."""
    pi = mixture_weights(n, rho, exact).weights
    means, variances = onemax_moments(n, exact)
    zero = Fraction(0) if exact else 0.0
    mean = sum((w * mu for w, mu in zip(pi, means)), zero)
    second = sum((w * (s + mu * mu) for w, mu, s in zip(pi, means, variances)), zero)
    return mean, second - mean * mean


# ---------------------------------------------------------------------------
# LeadingOnes


@dataclass(frozen=True)
class LeadingOnesParams:
    """String length ``n`` and mutation probability ``p`` (``q = 1 - p``, ``c = p n``)."""

    n: int
    p: object

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")

    @classmethod
    def from_c(cls, n: int, c, exact: bool = True) -> "LeadingOnesParams":
        p = as_rational(c) / n if exact else float(c) / n
        return cls(n, p)

    @property
    def q(self):
        return 1 - self.p

    @property
    def c(self):
        return self.p * self.n

    @property
    def exact(self) -> bool:
        return isinstance(self.p, Fraction)


@dataclass(frozen=True)
class LeadingOnesMoments:
    mean: object
    variance: object
    third_central: object
    fourth_central: object


def _lo_check(params: LeadingOnesParams, m: int) -> None:
    if not 1 <= m <= params.n:
        raise ValueError("need 1 <= m <= n")


def leadingones_second_moment(params: LeadingOnesParams, m: int):
    """``E(Y_{n,m}^2)``."""
    _lo_check(params, m)
    p, q, n = params.p, params.q, params.n
    nu = _lo_mean(params, m)
    top = q * q * (2 - q) - (q + 1) * q ** (m + 1) * (2 * q - 1) + (2 * q - 1) * (2 * q * q - 1) * q ** (2 * m)
    return -nu + top / (2 * p ** 4 * (1 + q) * q ** (2 * n))


def _lo_mean(params: LeadingOnesParams, m: int):
    p, q, n = params.p, params.q, params.n
    return (1 / (p * q ** (n - 1))) * ((1 - q ** (m - 1)) / (2 * p) + q ** (m - 1))


def leadingones_moments(params: LeadingOnesParams, m: int) -> LeadingOnesMoments:
    """Mean, variance and third/fourth central moments of ``Y_{n,m}``.

    The fourth central moment uses
    ``E(Y-nu)^4 = 3 var^2 + 3(15q^4 - (16q^4-1)q^(4m)) / (8(1-q^4)(pq^n)^4)
    - 6 kappa - 11 var - 6 nu``.
    """
    _lo_check(params, m)
    p, q, n = params.p, params.q, params.n
    nu = _lo_mean(params, m)
    var = -nu + (3 * q * q - (4 * q * q - 1) * q ** (2 * m)) / (4 * p ** 3 * (1 + q) * q ** (2 * n))
    pqn = p * q ** n
    kappa = (7 * q ** 3 - (8 * q ** 3 - 1) * q ** (3 * m)) / (4 * (1 - q ** 3) * pqn ** 3) - 3 * var - 2 * nu
    fourth = (3 * var * var
              + 3 * (15 * q ** 4 - (16 * q ** 4 - 1) * q ** (4 * m)) / (8 * (1 - q ** 4) * pqn ** 4)
              - 6 * kappa - 11 * var - 6 * nu)
    return LeadingOnesMoments(nu, var, kappa, fourth)


def leadingones_random_start(params: LeadingOnesParams) -> tuple:
    """``(nu_n, var_n)`` for a uniformly random initial string."""
    p, q, n = params.p, params.q, params.n
    nu = q / (2 * p * p) * (q ** (-n) - 1)
    var = 3 * q * q / (4 * p ** 3 * (1 + q)) * (q ** (-2 * n) - 1) - nu
    return nu, var


def leadingones_table(params: LeadingOnesParams, kind: str = "leadingones_mean") -> MomentTable:
    zero = Fraction(0) if params.exact else 0.0
    if kind == "leadingones_mean":
        vals = [zero] + [leadingones_moments(params, m).mean for m in range(1, params.n + 1)]
    elif kind == "leadingones_var":
        vals = [zero] + [leadingones_moments(params, m).variance for m in range(1, params.n + 1)]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return MomentTable(params.n, kind, tuple(vals), params.exact)


def symbolic_to_json(funcs) -> str:
    """Coefficient arrays (integer form) of a list of rational functions."""
    out = []
    for m, f in enumerate(funcs):
        num, den = f.integer_form()
        out.append({
            "m": m,
            "numerator": [str(c) for c in num.coeffs],
            "denominator": [str(c) for c in den.coeffs],
            "numerator_text": str(num),
            "denominator_text": str(den),
        })
    return json.dumps(out, indent=2)
