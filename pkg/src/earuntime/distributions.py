"""Exact hitting-time distributions and the limit laws they approach.

OneMax times are phase-type: the law of the deficit after ``t`` steps is
obtained by pushing a probability vector through the triangular kernel, and
``P(X <= t)`` is the mass already absorbed at deficit 0.

LeadingOnes times from deficit ``m`` are a sum of independent parts: one
``Geo(pq^{n-m})`` and, for ``j = 1..m-1``, a fair mixture of ``0`` and
``Geo(pq^{n-j})``. Each convolution with a geometric law is a first-order
linear filter, ``h[t] = P f[t-1] + (1-P) h[t-1]``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO

import numpy as np
from scipy import signal, special

from .exactnum import TruncatedSeries
from .moments import LeadingOnesParams, harmonic, mixture_weights
from .transition import TransitionKernel

__all__ = [
    "BudgetExceeded",
    "DiscreteCdf",
    "onemax_exact_cdf",
    "onemax_mixed_cdf",
    "onemax_pgf_moments",
    "leadingones_exact_cdf",
    "leadingones_pgf",
    "LimitLaw",
    "limit_cdf",
    "normalization",
    "ks_distance",
    "KSReport",
]

SCHEMA_VERSION = 1
DEFAULT_BUDGET = 5 * 10 ** 7


class BudgetExceeded(RuntimeError):
    """The requested horizon would exceed the work budget."""


@dataclass
class DiscreteCdf:
    """``values[i] = P(X <= offset + i)`` for ``i = 0..len-1``.

    ``values`` is a float array, or a tuple of Fractions when ``exact``.
    """

    values: object
    offset: int = 0
    exact: bool = False

    def __post_init__(self):
        if self.exact:
            self.values = tuple(self.values)
        else:
            self.values = np.asarray(self.values, dtype=float)

    def __len__(self):
        return len(self.values)

    @property
    def t_max(self) -> int:
        return self.offset + len(self.values) - 1

    @property
    def tail_mass(self):
        return 1 - self.values[-1]

    def __call__(self, t):
        """Right-continuous evaluation at an integer or real ``t``."""
        i = math.floor(t) - self.offset
        if i < 0:
            return Fraction(0) if self.exact else 0.0
        if i >= len(self.values):
            return self.values[-1]
        return self.values[i]

    def pmf(self):
        if self.exact:
            prev = Fraction(0)
            out = []
            for v in self.values:
                out.append(v - prev)
                prev = v
            return tuple(out)
        return np.diff(self.values, prepend=0.0)

    def is_nondecreasing(self) -> bool:
        v = self.values
        if self.exact:
            return all(b >= a for a, b in zip(v, v[1:])) and v[-1] <= 1
        return bool(np.all(np.diff(v) >= -1e-15) and v[-1] <= 1 + 1e-12)

    def mean(self):
        """Tail sum ``sum_{t>=0} (1 - F(t))`` truncated at ``t_max``."""
        return self._tail_sum(lambda t: 1)

    def variance(self):
        """From ``E X^2 = sum_t (2t+1)(1 - F(t))``, truncated at ``t_max``."""
        mu = self.mean()
        return self._tail_sum(lambda t: 2 * t + 1) - mu * mu

    def _tail_sum(self, weight):
        if self.exact:
            tot = Fraction(0)
            for t in range(self.offset):
                tot += weight(t)
            for i, v in enumerate(self.values):
                tot += weight(self.offset + i) * (1 - v)
            return tot
        ts = np.arange(self.t_max + 1, dtype=float)
        surv = np.ones_like(ts)
        surv[self.offset:] = 1.0 - self.values
        return float(np.sum(weight(ts) * surv))

    def to_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "cdf"])
        for i, v in enumerate(self.values):
            w.writerow([self.offset + i, str(v) if self.exact else f"{v:.17g}"])


def _default_onemax_horizon(n: int, m: int) -> int:
    return math.ceil(8 * math.e * n * (float(harmonic(m)) + 1))


def _check_budget(t_max: int, m: int, budget: int) -> None:
    if t_max * max(m, 1) > budget:
        raise BudgetExceeded(f"t_max*m = {t_max * m} exceeds the budget {budget}")


def _iterate_deficits(n: int, start: Sequence, t_max: int, exact: bool) -> list:
    """Push the deficit distribution ``start`` (indexed by deficit) through
    ``t_max`` steps; return ``P(deficit = 0)`` after each of ``0..t_max`` steps."""
    m = len(start) - 1
    kern = TransitionKernel(n, "exact" if exact else "float")
    if not exact:
        P = np.zeros((m + 1, m + 1))
        P[0, 0] = 1.0
        for j in range(1, m + 1):
            row = np.array(kern.row(j), dtype=float)
            P[j, j - np.arange(1, j + 1)] = row
            P[j, j] = 1.0 - row.sum()
        v = np.array(start, dtype=float)
        out = np.empty(t_max + 1)
        out[0] = v[0]
        for t in range(1, t_max + 1):
            v = v @ P
            out[t] = v[0]
        return out
    rows = [()] + [kern.row(j) for j in range(1, m + 1)]
    stay = [Fraction(1)] + [1 - sum(rows[j], Fraction(0)) for j in range(1, m + 1)]
    v = [Fraction(x) for x in start]
    out = [v[0]]
    for _ in range(t_max):
        new = [v[k] * stay[k] for k in range(m + 1)]
        for j in range(1, m + 1):
            if v[j]:
                for ell, w in enumerate(rows[j], start=1):
                    new[j - ell] += v[j] * w
        v = new
        out.append(v[0])
    return out


def onemax_exact_cdf(n: int, m_start: int, t_max: int | None = None, exact: bool = False,
                     budget: int = DEFAULT_BUDGET) -> DiscreteCdf:
    """``P(X_{n,m} <= t)`` for ``t = 0..t_max`` by forward iteration of the deficit law.

    ``t_max`` defaults to ``ceil(8 e n (H_m + 1))``; in exact mode the missing
    mass is reported as ``tail_mass`` rather than extended.
    """
    if not 1 <= m_start <= n:
        raise ValueError("need 1 <= m_start <= n")
    if t_max is None:
        t_max = _default_onemax_horizon(n, m_start)
    _check_budget(t_max, m_start, budget)
    start = [0] * m_start + [1]
    return DiscreteCdf(_iterate_deficits(n, start, t_max, exact), 0, exact)


def onemax_mixed_cdf(n: int, rho, t_max: int | None = None, exact: bool = False,
                     budget: int = DEFAULT_BUDGET) -> DiscreteCdf:
    """CDF of ``X_n`` when the initial number of zeros is Binomial(n, rho),
    including the atom ``P(X_n = 0) = (1 - rho)^n``."""
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    if t_max is None:
        t_max = _default_onemax_horizon(n, n)
    _check_budget(t_max, n, budget)
    w = mixture_weights(n, rho, exact).weights
    return DiscreteCdf(_iterate_deficits(n, w, t_max, exact), 0, exact)


def onemax_pgf_moments(n: int, m: int) -> tuple:
    """Exact ``(E X_{n,m}, V X_{n,m})`` from derivatives of the probability
    generating function at ``t = 1``.

    With ``t = 1 + s`` each ``P_j(t) = t sum_l lambda_{j,l} P_{j-l}(t) /
    (1 - t(1 - Lambda_j))`` is a power series in ``s``; the first two
    coefficients give the factorial moments. This is the closed form of the
    tail sums ``sum_t P(X > t)`` and ``sum_t (2t+1) P(X > t)``.
    """
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    order = 3
    kern = TransitionKernel(n, "exact")
    one = TruncatedSeries.constant(Fraction(1), order, variable="s")
    t = TruncatedSeries.polynomial([Fraction(1), Fraction(1)], order, variable="s")
    P = [one]
    for j in range(1, m + 1):
        row = kern.row(j)
        lam_j = sum(row, Fraction(0))
        acc = None
        for ell, w in enumerate(row, start=1):
            term = P[j - ell] * w
            acc = term if acc is None else acc + term
        P.append(t * acc / (one - t * (1 - lam_j)))
    s = P[m]
    mean = s[1]
    fact2 = 2 * s[2]
    return mean, fact2 + mean - mean * mean


# ---------------------------------------------------------------------------
# LeadingOnes


def _lo_probs(params: LeadingOnesParams, m: int) -> list:
    """Geometric parameters ``pq^{n-j}`` for ``j = 1..m``."""
    if not 1 <= m <= params.n:
        raise ValueError("need 1 <= m <= n")
    p, q, n = params.p, params.q, params.n
    return [p * q ** (n - j) for j in range(1, m + 1)]


def _geo_filter_exact(f: list, P) -> list:
    h = []
    prev = Fraction(0)
    for t in range(len(f)):
        prev = (P * f[t - 1] if t else Fraction(0)) + (1 - P) * prev
        h.append(prev)
    return h


def leadingones_exact_cdf(params: LeadingOnesParams, m: int, t_max: int | None = None,
                          exact: bool | None = None, budget: int = DEFAULT_BUDGET) -> DiscreteCdf:
    """CDF of ``Y_{n,m}`` on ``t = 0..t_max`` by iterated convolution."""
    if exact is None:
        exact = params.exact
    P = _lo_probs(params, m)
    if t_max is None:
        nu = sum(1 / float(x) for x in P[:-1]) / 2 + 1 / float(P[-1])
        sd = math.sqrt(sum((3 - 2 * float(x)) / (4 * float(x) ** 2) for x in P[:-1])
                       + (1 - float(P[-1])) / float(P[-1]) ** 2)
        t_max = math.ceil(nu + 14 * sd + 20 / float(P[-1]))
    _check_budget(t_max, m, budget)
    if exact:
        f = [Fraction(1)] + [Fraction(0)] * t_max
        for x in P[:-1]:
            h = _geo_filter_exact(f, Fraction(x))
            f = [(a + b) / 2 for a, b in zip(f, h)]
        f = _geo_filter_exact(f, Fraction(P[-1]))
        cdf, acc = [], Fraction(0)
        for v in f:
            acc += v
            cdf.append(acc)
        return DiscreteCdf(cdf, 0, True)
    f = np.zeros(t_max + 1)
    f[0] = 1.0
    for x in P[:-1] + [None]:
        Pj = float(P[-1] if x is None else x)
        h = signal.lfilter([0.0, Pj], [1.0, -(1.0 - Pj)], f)
        f = h if x is None else 0.5 * (f + h)
    return DiscreteCdf(np.minimum(np.cumsum(f), 1.0), 0, False)


def leadingones_pgf(params: LeadingOnesParams, m: int, t, method: str = "convolution"):
    """``E(t^{Y_{n,m}})`` by one of three representations.

    ``recurrence``: ``Q_m = G_m(t) (2^{1-m} + sum_{l<m} Q_l / 2^{m-l})``;
    ``product``: ``prod`` form in ``w = 1 - 1/t``;
    ``convolution``: ``G_m(t) prod_{j<m} (1 + G_j(t)) / 2``.
    """
    P = _lo_probs(params, m)

    def G(j):
        x = P[j - 1]
        return x * t / (1 - (1 - x) * t)

    if method == "recurrence":
        Q = [None]
        for k in range(1, m + 1):
            inner = Fraction(1, 2 ** (k - 1)) + sum((Q[l] / 2 ** (k - l) for l in range(1, k)), 0)
            Q.append(G(k) * inner)
        return Q[m]
    if method == "product":
        w = 1 - 1 / t
        out = 1 / (1 - w / P[m - 1])
        for j in range(1, m):
            out *= (1 - w / (2 * P[j - 1])) / (1 - w / P[j - 1])
        return out
    if method == "convolution":
        out = G(m)
        for j in range(1, m):
            out *= (1 + G(j)) / 2
        return out
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# limit laws


_KINDS = ("sum_of_exponentials", "gumbel", "gamma_mixture", "normal")


@dataclass(frozen=True)
class LimitLaw:
    kind: str
    m: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown law {self.kind!r}")
        if self.kind in ("sum_of_exponentials", "gamma_mixture") and (self.m is None or self.m < 1):
            raise ValueError(f"{self.kind} needs m >= 1")

    def cdf(self, x):
        return limit_cdf(self, x)

    def describe(self) -> str:
        return self.kind if self.m is None else f"{self.kind}({self.m})"


def limit_cdf(law: LimitLaw, x):
    """CDF of ``law`` at ``x`` (scalar or array)."""
    x = np.asarray(x, dtype=float)
    if law.kind == "gumbel":
        out = np.exp(-np.exp(-x))
    elif law.kind == "normal":
        out = special.ndtr(x)
    elif law.kind == "sum_of_exponentials":
        xp = np.maximum(x, 0.0)
        out = (-np.expm1(-xp)) ** law.m
    else:
        xp = np.maximum(x, 0.0)
        m = law.m
        out = np.zeros_like(xp)
        for j in range(m):
            out = out + math.comb(m - 1, j) * special.gammainc(j + 1, xp)
        out = out / 2 ** (m - 1)
    return float(out) if out.ndim == 0 else out


def normalization(law: LimitLaw, n: int, m: int | None = None, rho: float | None = None,
                  c: float | None = None, mean: float | None = None,
                  sd: float | None = None) -> tuple:
    """``(center, scale)`` such that ``(X - center) / scale`` approaches ``law``.

    * ``sum_of_exponentials``: ``X_{n,m} / (e n)``.
    * ``gumbel`` with ``m``: ``X_{n,m}/(e n) - log m - phi_1(m/n)``; with ``rho``:
      ``X_n/(e n) - log(rho n) - phi_1(rho)``.
    * ``gamma_mixture``: ``c Y_{n,m} / (e^c n)``.
    * ``normal``: ``(Y - mean) / sd``.
    """
    from .specfun import phi

    en = math.e * n
    if law.kind == "sum_of_exponentials":
        return 0.0, en
    if law.kind == "gumbel":
        if rho is not None:
            return en * (math.log(rho * n) + phi(1, rho)), en
        if m is None:
            raise ValueError("gumbel normalization needs m or rho")
        return en * (math.log(m) + phi(1, m / n)), en
    if law.kind == "gamma_mixture":
        if c is None:
            raise ValueError("gamma_mixture normalization needs c")
        return 0.0, math.exp(c) * n / c
    if mean is None or sd is None:
        raise ValueError("normal normalization needs mean and sd")
    return float(mean), float(sd)


def ks_distance(data, law: LimitLaw, center: float = 0.0, scale: float = 1.0,
                grid: int = 20001) -> float:
    """Sup-distance between a normalized distribution and ``law``.

    ``data`` is a :class:`DiscreteCdf` (integer support), a sample of values,
    or another :class:`LimitLaw` (compared on a fine grid). For a step CDF the
    supremum is attained at a jump, from the left or the right. Unresolved tail
    mass of a truncated CDF counts in full.
    """
    if isinstance(data, LimitLaw):
        xs = np.linspace(-20.0, 20.0, grid)
        return float(np.max(np.abs(limit_cdf(data, xs) - limit_cdf(law, xs))))
    if scale <= 0:
        raise ValueError("scale must be positive")
    if isinstance(data, DiscreteCdf):
        F = np.asarray([float(v) for v in data.values]) if data.exact else data.values
        ts = np.arange(data.offset, data.t_max + 1, dtype=float)
        left = np.concatenate(([0.0], F[:-1]))
        tail = 1.0 - F[-1]
    else:
        sample = np.asarray(data, dtype=float).ravel()
        if sample.size == 0:
            raise ValueError("empty sample")
        ts, counts = np.unique(sample, return_counts=True)
        F = np.cumsum(counts) / sample.size
        left = np.concatenate(([0.0], F[:-1]))
        tail = 0.0
    G = limit_cdf(law, (ts - center) / scale)
    G = np.atleast_1d(G)
    d = max(float(np.max(np.abs(F - G))), float(np.max(np.abs(left - G))))
    return max(d, float(tail))


@dataclass
class KSReport:
    law: str
    n: int
    m: object
    normalization: dict
    ks: float
    sample_size: object
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        d = dict(schema_version=SCHEMA_VERSION, law=self.law, n=self.n, m=self.m,
                 normalization=self.normalization, ks=self.ks, sample_size=self.sample_size)
        d.update(self.extra)
        return json.dumps(d, indent=2, sort_keys=True)
