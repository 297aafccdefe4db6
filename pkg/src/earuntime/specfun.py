"""Special functions of the OneMax runtime expansions.

``S_r`` and ``U_r`` are the leading and first-order terms of the weighted
kernel sums ``sum_l l^r lambda*_{n,m,l}`` as functions of ``alpha = m/n``::

    S_r(z) = sum_{l>=1} z^l/l! sum_{0<=j<l} (l-j)^r (1-z)^j/j!

The correction functions ``phi_k`` (mean) and ``psi_k`` (variance) are
defined by first-order ODEs whose right-hand sides are built from ``S_r``.
They are evaluated from their Taylor series, at ``alpha = 0`` below the
switchover point and at ``alpha = 1`` above it.

Taylor data at 0 is exact (Fractions). Data at 1 is obtained from the
reflection identities, which express ``S_r(1-x)`` through ``S_r(x)`` and
``e`` times a polynomial, and is carried in floats.

The ODEs for ``phi_1 .. phi_{K+1}`` come from a matched expansion of the mean
recurrence: substitute ``mu* = sum_k n^-k (b_k H_m + phi_{k+1}(m/n))`` and
collect powers of ``1/n``. That needs the ``1/n`` expansion of the weighted
kernel sums, whose coefficients ``W_{d,i}`` are computed here as finite
combinations of ``S_j`` and the Bessel-type sums ``eps_k``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special

from .exactnum import TruncatedSeries

__all__ = [
    "S",
    "U",
    "bessel_bar",
    "S_derivative",
    "euler_gamma",
    "SeriesFamilyConfig",
    "CorrectionFunction",
    "phi",
    "psi",
    "phi_function",
    "psi_function",
    "phi_series",
    "psi_series",
    "mean_correction_coefficients",
    "kernel_sum_coefficient",
    "c1",
    "c2",
    "v1",
    "v2",
    "SpecialValueTable",
    "constants",
    "reference_constants",
    "check_constants",
]

E = math.e
_TERMS = 48  # terms of the float double sums; z**48/48! is far below 1e-16 on [0, 1]

# reflection: S_r(1-x) = sign_r * S_r(x) + e * poly_r(x), r = 1..4
_REFLECT = {
    1: (1, (1, -2)),
    2: (-1, (2, -4, 4)),
    3: (1, (5, -14, 12, -8)),
    4: (-1, (15, -48, 64, -32, 16)),
}


# ---------------------------------------------------------------------------
# float evaluation


@lru_cache(maxsize=None)
def _inv_fact_table(terms: int = _TERMS) -> np.ndarray:
    """``A[s, b] = 1/((b+s)! b!)``."""
    a = np.empty((terms + 1, terms + 1))
    for s in range(terms + 1):
        for b in range(terms + 1):
            a[s, b] = math.exp(-math.lgamma(b + s + 1) - math.lgamma(b + 1))
    return a


def _eps_neg_matrix(z: np.ndarray) -> np.ndarray:
    """``eps_{-s}(z)`` for s = 0..TERMS, shape (TERMS+1,) + z.shape.

    ``eps_{-s}(z) = sum_b z^(b+s) (1-z)^b / ((b+s)! b!)``.
    """
    a = _inv_fact_table()
    t = z * (1.0 - z)
    powers_b = t[None, ...] ** np.arange(_TERMS + 1).reshape((-1,) + (1,) * z.ndim)
    inner = np.tensordot(a, powers_b, axes=(1, 0))
    powers_s = z[None, ...] ** np.arange(_TERMS + 1).reshape((-1,) + (1,) * z.ndim)
    return inner * powers_s


def S(r: int, z):
    """``S_r(z)`` by direct summation (all terms positive on [0, 1])."""
    if not 0 <= r <= 4:
        raise ValueError("S_r is provided for r = 0..4")
    zz = np.asarray(z, dtype=float)
    eps = _eps_neg_matrix(zz)
    weights = np.arange(_TERMS + 1, dtype=float) ** r
    weights[0] = 0.0
    out = np.tensordot(weights, eps, axes=(0, 0))
    return float(out) if np.ndim(z) == 0 else out


def bessel_bar(kind: str, alpha):
    """``I0bar(a) = sum a^l (1-a)^l/(l!)^2`` or ``I1bar(a) = sum a^l (1-a)^(l-1)/(l!(l-1)!)``."""
    zz = np.asarray(alpha, dtype=float)
    if kind in ("I0bar", "I0", 0):
        out = _eps_neg_matrix(zz)[0]
    elif kind in ("I1bar", "I1", 1):
        out = _eps_neg_matrix(zz)[1]
    else:
        raise ValueError(f"unknown Bessel form {kind!r}")
    return float(out) if np.ndim(alpha) == 0 else out


def U(r: int, z):
    """First-order term ``U_r`` of the weighted kernel sums."""
    if r == 0:
        return 0.5 * S(0, z) - 1.5 * bessel_bar("I1bar", z)
    if not 1 <= r <= 3:
        raise ValueError("U_r is provided for r = 0..3")
    acc = (2 * r - 1) * S(r, z)
    for j in range(r):
        w = math.comb(r, j) * Fraction(j - (-1) ** (r - j) * (2 * r + 2 - 3 * j), r + 1 - j)
        acc = acc + float(w) * S(j, z)
    return -0.5 * acc


def S_derivative(r: int, z, order: int = 1):
    """Derivatives of ``S_r`` via ``S_r' = I0bar + sum_j C(r,j) S_j (1-(-1)^(r-j))``
    (``S_0' = I0bar + I1bar``), iterated numerically for ``order = 2`` only through
    the identity ``S_1'' = 2 I0bar + I1bar/z``."""
    if order == 1:
        if r == 0:
            return bessel_bar("I0bar", z) + bessel_bar("I1bar", z)
        acc = bessel_bar("I0bar", z)
        for j in range(r):
            acc = acc + math.comb(r, j) * (1 - (-1) ** (r - j)) * S(j, z)
        return acc
    if order == 2 and r == 1:
        return 2 * bessel_bar("I0bar", z) + bessel_bar("I1bar", z) / np.asarray(z, dtype=float)
    raise ValueError("only first derivatives and S_1'' are provided")


def euler_gamma(N: int = 20, terms: int = 8) -> float:
    """Euler's constant by Euler-Maclaurin: ``H_N - log N - 1/(2N) + sum B_2k/(2k N^2k)``."""
    b = _bernoulli(2 * terms)
    h = sum(Fraction(1, j) for j in range(1, N + 1))
    corr = Fraction(-1, 2 * N)
    for k in range(1, terms + 1):
        corr += b[2 * k] / (2 * k * Fraction(N) ** (2 * k))
    return float(h + corr) - math.log(N)


# ---------------------------------------------------------------------------
# exact Taylor data at alpha = 0


@lru_cache(maxsize=None)
def _bernoulli(N: int) -> tuple:
    """``B_0 .. B_N`` with ``B_1 = -1/2``."""
    b = [Fraction(1)]
    for k in range(1, N + 1):
        b.append(-sum(math.comb(k + 1, j) * b[j] for j in range(k)) / (k + 1))
    return tuple(b)


@lru_cache(maxsize=None)
def _faulhaber(r: int) -> tuple:
    """Coefficients (by power of l) of ``beta_r(l) = sum_{0<=j<l} j^(r-1)`` with ``0^0 = 1``."""
    b = _bernoulli(r)
    p = r - 1
    out = [Fraction(0)] * (r + 1)
    for i in range(p + 1):
        out[p + 1 - i] += math.comb(p + 1, i) * b[i] / (p + 1)
    return tuple(out)


@lru_cache(maxsize=None)
def _eps_coeffs(k: int, order: int) -> tuple:
    """Taylor coefficients at 0 of ``eps_k(a) = [z^k] exp(a/z + (1-a) z)``.

    ``eps_k = sum_a a^a' (1-a)^(a'+k)/(a'!(a'+k)!)``; ``eps_0 = I0bar``,
    ``eps_{-1} = I1bar``.
    """
    out = [Fraction(0)] * order
    if k >= 0:
        # sum_a alpha^a (1-alpha)^(a+k) / (a! (a+k)!)
        for a in range(order):
            base = Fraction(1, math.factorial(a) * math.factorial(a + k))
            for i in range(0, min(a + k, order - 1 - a) + 1):
                out[a + i] += base * math.comb(a + k, i) * (-1) ** i
    else:
        s = -k
        for b in range(order):
            if b + s >= order:
                break
            base = Fraction(1, math.factorial(b + s) * math.factorial(b))
            for i in range(0, min(b, order - 1 - b - s) + 1):
                out[b + s + i] += base * math.comb(b, i) * (-1) ** i
    return tuple(out)


@lru_cache(maxsize=None)
def _S_coeffs(r: int, order: int) -> tuple:
    """Taylor coefficients at 0 of ``S_r = sum_{s>=1} s^r eps_{-s}``."""
    out = [Fraction(0)] * order
    for s in range(1, order):
        w = s ** r
        for t, c in enumerate(_eps_coeffs(-s, order)):
            if c:
                out[t] += w * c
    return tuple(out)


def S_series(r: int, order: int = 12) -> TruncatedSeries:
    """Exact Taylor series of ``S_r`` at 0."""
    return TruncatedSeries(_S_coeffs(r, order), variable="z", point=0)


# ---------------------------------------------------------------------------
# series kit: the basic functions as series about 0 (exact) or 1 (float)


class _Kit:
    """Series of ``alpha``, ``S_r`` and ``eps_k`` about ``point`` in the local
    coordinate ``x`` (``alpha = x`` at 0, ``alpha = 1 - x`` at 1)."""

    def __init__(self, point: int, order: int):
        if point not in (0, 1):
            raise ValueError("expansion point must be 0 or 1")
        self.point = point
        self.order = order
        self.exact = point == 0
        self.sign = 1 if point == 0 else -1
        one = Fraction(1) if self.exact else 1.0
        self.one = one
        if point == 0:
            self.alpha = TruncatedSeries([one] + [one * 0] * (order - 1), "x", 0, valuation=1)
        else:
            self.alpha = TruncatedSeries.polynomial([one, -one], order, point=1)
        self._S: dict = {}
        self._eps: dict = {}
        self._inv: dict = {}

    def series(self, coeffs) -> TruncatedSeries:
        coeffs = list(coeffs)[: self.order]
        if not self.exact:
            coeffs = [float(c) for c in coeffs]
        return TruncatedSeries(coeffs, "x", self.point)

    def const(self, c) -> TruncatedSeries:
        c = Fraction(c) if self.exact else float(c)
        return TruncatedSeries.constant(c, self.order, self.point)

    def S(self, r: int) -> TruncatedSeries:
        if r not in self._S:
            base = _S_coeffs(r, self.order)
            if self.point == 0:
                s = self.series(base)
            elif r == 0:
                i0 = _eps_coeffs(0, self.order)
                coeffs = [-float(a) - float(b) for a, b in zip(i0, base)]
                coeffs[0] += E
                s = self.series(coeffs)
            else:
                sign, poly = _REFLECT[r]
                coeffs = [sign * float(c) for c in base]
                for i, p in enumerate(poly):
                    coeffs[i] += E * p
                s = self.series(coeffs)
            self._S[r] = s
        return self._S[r]

    def eps(self, k: int) -> TruncatedSeries:
        """``eps_k(alpha)``; about 1 this uses ``eps_k(1-x) = eps_{-k}(x)``."""
        if k not in self._eps:
            kk = k if self.point == 0 else -k
            self._eps[k] = self.series(_eps_coeffs(kk, self.order))
        return self._eps[k]

    def inv_alpha(self, r: int) -> TruncatedSeries:
        if r not in self._inv:
            base = self.alpha.reciprocal(allow_pole=True)
            self._inv[r] = base ** r
        return self._inv[r]

    def d(self, s: TruncatedSeries, k: int = 1) -> TruncatedSeries:
        """k-th derivative with respect to alpha."""
        for _ in range(k):
            s = s.derivative() * self.sign
        return s

    def alpha_poly(self, coeffs) -> TruncatedSeries:
        """Polynomial in alpha with the given coefficient list."""
        acc = self.const(0)
        power = self.const(1)
        for c in coeffs:
            if c:
                acc = acc + power * (Fraction(c) if self.exact else float(c))
            power = power * self.alpha
        return acc


# ---------------------------------------------------------------------------
# 1/n expansion of the weighted kernel sums


def _lpoly_mul(a: dict, b: dict) -> dict:
    """Multiply Laurent polynomials in z whose coefficients are polynomials in alpha."""
    out: dict = {}
    for pa, ca in a.items():
        for pb, cb in b.items():
            acc = out.setdefault(pa + pb, [])
            need = len(ca) + len(cb) - 1
            if len(acc) < need:
                acc.extend([Fraction(0)] * (need - len(acc)))
            for i, x in enumerate(ca):
                for j, y in enumerate(cb):
                    acc[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def _correction_polys(i_max: int) -> tuple:
    """``C_i(z)`` with ``(1+1/(nz))^m (1+z/n)^(n+1-m) = exp(a/z+(1-a)z) sum_i C_i(z) n^-i``."""
    c = [None]
    for j in range(1, i_max + 1):
        sj = (-1) ** j
        term = {
            -j - 1: [Fraction(0), Fraction(sj, j + 1)],
            j + 1: [Fraction(sj, j + 1), Fraction(-sj, j + 1)],
            j: [Fraction(-sj, j)],
        }
        c.append(term)
    C = [{0: [Fraction(1)]}]
    for i in range(1, i_max + 1):
        acc: dict = {}
        for j in range(1, i + 1):
            prod = _lpoly_mul(c[j], C[i - j])
            for p, coeffs in prod.items():
                tgt = acc.setdefault(p, [])
                if len(tgt) < len(coeffs):
                    tgt.extend([Fraction(0)] * (len(coeffs) - len(tgt)))
                for t, v in enumerate(coeffs):
                    tgt[t] += v * j / i
        C.append({p: v for p, v in acc.items() if any(v)})
    return tuple(C)


def _T(kit: _Kit, d: int, p: int) -> TruncatedSeries:
    """``sum_{l>=1} l^d eps_{-l-p}(alpha)`` through ``S_j`` plus boundary terms."""
    acc = kit.const(0)
    for j in range(d + 1):
        w = math.comb(d, j) * (-p) ** (d - j)
        if w:
            acc = acc + kit.S(j) * w
    if p > 0:
        for s in range(1, p + 1):
            acc = acc - kit.eps(-s) * (s - p) ** d
    elif p < 0:
        for s in range(p + 1, 1):
            acc = acc + kit.eps(-s) * (s - p) ** d
    return acc


def _W(kit: _Kit, d: int, i: int) -> TruncatedSeries:
    if i == 0:
        return kit.S(d)
    acc = kit.const(0)
    for p, coeffs in _correction_polys(i)[i].items():
        acc = acc + kit.alpha_poly(coeffs) * _T(kit, d, p)
    return acc


def kernel_sum_coefficient(d: int, i: int, alpha, order: int = 40) -> float:
    """Coefficient of ``n^-i`` in ``sum_l l^d lambda*_{n,m,l}`` at ``alpha = m/n``
    (``i = 0`` gives ``S_d``, ``i = 1`` gives ``U_d``)."""
    point = 0 if alpha <= 0.5 else 1
    kit = _Kit(point, order)
    s = _W(kit, d, i)
    x = alpha if point == 0 else 1 - alpha
    return float(s.map(float).evaluate(x))


# ---------------------------------------------------------------------------
# matched expansion of the mean recurrence


def _mean_engine(kit: _Kit, K_max: int, b_known=None):
    """Solve for ``phi'_{k+1}`` (as series) and ``b_k`` for ``k = 0..K_max``.

    Order ``n^-(K+1)`` of ``sum_l lambda*(mu*_m - mu*_{m-l}) = 1/n`` gives
    ``(b_K/alpha + phi'_{K+1}) S_1 = Psi_{K+1}``. About 0 the coefficient
    ``b_K`` is read off the pole of ``Psi/S_1``; about 1 it must be supplied.
    """
    dphi: list[TruncatedSeries] = []
    derivs: dict = {}
    b: list = []

    def phi_deriv(k: int, r: int) -> TruncatedSeries:
        # r-th derivative of phi_{k+1}
        key = (k, r)
        if key not in derivs:
            derivs[key] = dphi[k] if r == 1 else kit.d(phi_deriv(k, r - 1))
        return derivs[key]

    for K in range(K_max + 1):
        total = kit.const(0)
        for N in range(1, K + 2):
            i = K + 1 - N
            coeffs: dict[int, TruncatedSeries] = {}
            for k in range(0, min(N - 1, K) + 1):
                r = N - k
                if k == K and r == 1:
                    continue
                if b[k] != 0:
                    for dd, f in enumerate(_faulhaber(r)):
                        if f:
                            term = kit.inv_alpha(r) * (b[k] * f)
                            coeffs[dd] = coeffs[dd] + term if dd in coeffs else term
                w = -Fraction((-1) ** r, math.factorial(r))
                term = phi_deriv(k, r) * (w if kit.exact else float(w))
                coeffs[r] = coeffs[r] + term if r in coeffs else term
            for dd, s in coeffs.items():
                total = total + s * _W(kit, dd, i)
        psi = (kit.const(1) if K == 0 else kit.const(0)) - total
        R = psi / kit.S(1)
        if b_known is None:
            R = R.normalized()
            if R.valuation < -1:
                raise ArithmeticError("matched expansion left a higher-order pole")
            bK = R[-1] if R.valuation == -1 else Fraction(0)
        else:
            bK = b_known[K]
        b.append(bK)
        d = R - kit.inv_alpha(1) * (bK if kit.exact else float(bK))
        d = d.normalized() if kit.exact else d
        dphi.append(d.as_power_series())
    return b, dphi


@lru_cache(maxsize=None)
def mean_correction_coefficients(K_max: int = 2, order: int = 12):
    """Exact data of the mean expansion up to ``phi_{K_max+1}``.

    Returns ``(b, phi)``: ``b[k]`` multiplies ``H_m n^-k`` and ``phi[k]`` is
    the exact Taylor series at 0 of ``phi_{k+1}`` (``order`` terms). The
    constant term of each ``phi_{k+1}`` is fixed by matching the exact
    expansion of ``mu*_{n,k}`` in powers of ``1/n``.
    """
    from .moments import mu_star_laurent

    kit = _Kit(0, order + 2 * K_max + 4)
    b, dphi = _mean_engine(kit, K_max)
    laurent = mu_star_laurent(K_max, K_max + 1)
    phis: list[TruncatedSeries] = []
    for K in range(K_max + 1):
        target = laurent[K][K]
        h = sum((Fraction(1, j) for j in range(1, K + 1)), Fraction(0))
        c0 = target - b[K] * h
        for k in range(K):
            c0 -= phis[k][K - k] * Fraction(K) ** (K - k)
        phis.append(dphi[K].integrate(c0).truncate(order))
    return tuple(b), tuple(phis)


# ---------------------------------------------------------------------------
# variance integrands (closed forms)


def _psi_integrand(kit: _Kit, k: int) -> TruncatedSeries:
    S0, S1, S2, S3 = kit.S(0), kit.S(1), kit.S(2), kit.S(3)
    ia = kit.inv_alpha
    if k == 1:
        out = S2 / S1 ** 3 - ia(2) + ia(1) * 2
    elif k == 2:
        dS1, dS2 = kit.d(S1), kit.d(S2)
        half = Fraction(1, 2) if kit.exact else 0.5
        out = (S2 * S2 * dS1 / S1 ** 5 * (-5 * half)
               + S3 * dS1 / S1 ** 4
               + S2 * S0 / S1 ** 4 * 3
               + S2 * dS2 / S1 ** 4 * half
               + S0 / S1 ** 3
               - kit.const(2) / S1 ** 2
               + ia(3) - ia(2) * 3 + ia(1) * (11 * half))
    else:
        raise ValueError("psi_k is provided for k = 1, 2")
    out = out.normalized() if kit.exact else out
    return out.as_power_series()


_PSI_AT_ZERO = {1: Fraction(0), 2: Fraction(7, 12)}


@lru_cache(maxsize=None)
def psi_series(k: int, order: int = 12) -> TruncatedSeries:
    """Exact Taylor series at 0 of ``psi_k``; ``psi_1(0) = 0``, ``psi_2(0) = 7/12``."""
    kit = _Kit(0, order + 8)
    return _psi_integrand(kit, k).integrate(_PSI_AT_ZERO[k]).truncate(order)


def phi_series(k: int, order: int = 12) -> TruncatedSeries:
    """Exact Taylor series at 0 of ``phi_k`` (``k = 1..3``)."""
    if not 1 <= k <= 3:
        raise ValueError("phi_k is provided for k = 1..3")
    return mean_correction_coefficients(2, order)[1][k - 1]


# ---------------------------------------------------------------------------
# numerical evaluation


@dataclass(frozen=True)
class SeriesFamilyConfig:
    """Truncation orders and switchover point of the dual expansion.

    ``truncation_order`` applies to the series about 1. The series about 0
    converges more slowly at the switchover (ratio ~0.49 against ~0.25), so
    it gets its own, longer ``origin_order``.
    """

    truncation_order: int = 40
    evaluation_switchover: float = 0.5
    origin_order: int = 100

    def __post_init__(self):
        if self.truncation_order < 2 or self.origin_order < 2:
            raise ValueError("truncation orders must be at least 2")
        if not 0 < self.evaluation_switchover < 1:
            raise ValueError("switchover must lie in (0, 1)")


class CorrectionFunction:
    """A function ``f`` on [0, 1] known through ``f(0)`` and the Taylor series of
    ``f'`` about 0 and about 1.

    Calling ``f(alpha, deriv)`` returns the ``deriv``-th derivative.
    """

    def __init__(self, name: str, value_at_zero, d0: list, d1: list, switchover: float):
        self.name = name
        self.value_at_zero = float(value_at_zero)
        self.switchover = switchover
        self._d0 = np.array([float(c) for c in d0])  # f'(alpha), coefficients in alpha
        self._d1 = np.array([float(c) for c in d1])  # f'(1 - x), coefficients in x
        self._f0 = np.concatenate([[self.value_at_zero], self._d0 / np.arange(1, len(self._d0) + 1)])
        F1 = np.concatenate([[0.0], self._d1 / np.arange(1, len(self._d1) + 1)])
        xs = 1.0 - switchover
        anchor = np.polynomial.polynomial.polyval(switchover, self._f0)
        # f(1-x) = anchor - (F1(x) - F1(xs))
        self._f1 = -F1
        self._f1[0] += anchor + np.polynomial.polynomial.polyval(xs, F1)
        self._cache: dict = {}

    def _coeffs(self, side: int, deriv: int) -> np.ndarray:
        key = (side, deriv)
        if key not in self._cache:
            base = self._f0 if side == 0 else self._f1
            c = np.polynomial.polynomial.polyder(base, deriv) if deriv else base
            if side == 1 and deriv % 2:
                c = -c
            self._cache[key] = c
        return self._cache[key]

    def __call__(self, alpha, deriv: int = 0):
        a = np.asarray(alpha, dtype=float)
        low = a <= self.switchover
        out = np.where(
            low,
            np.polynomial.polynomial.polyval(a, self._coeffs(0, deriv)),
            np.polynomial.polynomial.polyval(1.0 - a, self._coeffs(1, deriv)),
        )
        return float(out) if np.ndim(alpha) == 0 else out

    def __repr__(self):
        return f"CorrectionFunction({self.name!r})"


@lru_cache(maxsize=None)
def _mean_functions(config: SeriesFamilyConfig, K_max: int = 2):
    N = config.truncation_order
    N0 = config.origin_order
    b, phis = mean_correction_coefficients(K_max, N0 + 1)
    kit1 = _Kit(1, N + 2 * K_max + 4)
    _, dphi1 = _mean_engine(kit1, K_max, b_known=b)
    out = []
    for k in range(K_max + 1):
        d0 = phis[k].derivative().coefficients[:N0]
        d1 = dphi1[k].coefficients[:N]
        out.append(CorrectionFunction(f"phi_{k + 1}", phis[k][0], d0, d1, config.evaluation_switchover))
    return tuple(out)


@lru_cache(maxsize=None)
def _variance_functions(config: SeriesFamilyConfig):
    N = config.truncation_order
    N0 = config.origin_order
    kit0 = _Kit(0, N0 + 8)
    kit1 = _Kit(1, N + 8)
    out = []
    for k in (1, 2):
        d0 = _psi_integrand(kit0, k).coefficients[:N0]
        d1 = _psi_integrand(kit1, k).coefficients[:N]
        out.append(CorrectionFunction(f"psi_{k}", _PSI_AT_ZERO[k], d0, d1, config.evaluation_switchover))
    return tuple(out)


_DEFAULT = SeriesFamilyConfig()


def phi_function(k: int, config: SeriesFamilyConfig = _DEFAULT) -> CorrectionFunction:
    if not 1 <= k <= 3:
        raise ValueError("phi_k is provided for k = 1..3")
    return _mean_functions(config)[k - 1]


def psi_function(k: int, config: SeriesFamilyConfig = _DEFAULT) -> CorrectionFunction:
    if k not in (1, 2):
        raise ValueError("psi_k is provided for k = 1, 2")
    return _variance_functions(config)[k - 1]


def phi(k: int, alpha, deriv: int = 0, config: SeriesFamilyConfig = _DEFAULT):
    """``phi_k(alpha)`` or its ``deriv``-th derivative."""
    return phi_function(k, config)(alpha, deriv)


def psi(k: int, alpha, deriv: int = 0, config: SeriesFamilyConfig = _DEFAULT):
    """``psi_k(alpha)`` or its ``deriv``-th derivative."""
    return psi_function(k, config)(alpha, deriv)


# ---------------------------------------------------------------------------
# constants


def c1(config: SeriesFamilyConfig = _DEFAULT) -> float:
    """Coefficient of ``n`` in ``E(X_n)`` for a uniform start: ``-e(log 2 - gamma - phi_1(1/2))``."""
    return -E * (math.log(2) - euler_gamma() - phi(1, 0.5, config=config))


def c2(config: SeriesFamilyConfig = _DEFAULT) -> float:
    """Constant term of ``E(X_n)`` for a uniform start."""
    g = euler_gamma()
    s1 = S(1, 0.5)
    ds1 = S_derivative(1, 0.5)
    return (E / 2) * (-math.log(2) + g - phi(1, 0.5, config=config) + 2 * phi(2, 0.5, config=config)
                      + 1 / s1 - ds1 / (4 * s1 ** 2))


def v1(rho: float, config: SeriesFamilyConfig = _DEFAULT) -> float:
    p1 = phi_function(1, config)
    rb = 1 - rho
    d1 = p1(rho, 1)
    return (E * (math.pi ** 2 / 6 - 1) + E * psi(1, rho, config=config) - p1(rho)
            + 2 * E * rb * d1 + E * rb * rho * d1 ** 2)


def v2(rho: float, config: SeriesFamilyConfig = _DEFAULT) -> float:
    p1, p2 = phi_function(1, config), phi_function(2, config)
    q1, q2 = psi_function(1, config), psi_function(2, config)
    r, rb = rho, 1 - rho
    f0, f1, f2, f3 = p1(r), p1(r, 1), p1(r, 2), p1(r, 3)
    g0, g1 = p2(r), p2(r, 1)
    return (E * rb ** 2 * r ** 2 * f2 ** 2
            + 2 * E * rb ** 2 * r * (1 + r * f1) * f3
            + 2 * E * r * rb * (1 + f1) * f2
            + 4 * E * rb * (1 + r * g1) * f1
            + 2 * E * rb * r * f1 ** 2 + 4 * E * rb * g1
            + E * rb * r * q1(r, 2) - rb * r * f2
            + 2 * E * q2(r) - 2 * g0 + 2 * E * r * q1(r, 1)
            - 2 * r * f1 + f0 + 5 / 6 * E * math.pi ** 2 - 3 * E - 1)


@dataclass
class SpecialValue:
    name: str
    value: float
    formula_id: str
    tolerance: float
    note: str = ""


@dataclass
class SpecialValueTable:
    """Named constants with the formula they come from and a self-check tolerance."""

    entries: list = field(default_factory=list)

    def __getitem__(self, name: str) -> float:
        for e in self.entries:
            if e.name == name:
                return e.value
        raise KeyError(name)

    def names(self) -> list:
        return [e.name for e in self.entries]

    def as_records(self) -> list:
        return [dict(name=e.name, value=e.value, formula_id=e.formula_id,
                     tolerance=e.tolerance, note=e.note) for e in self.entries]

    def to_json(self) -> str:
        return json.dumps(self.as_records(), indent=2)


def constants(config: SeriesFamilyConfig = _DEFAULT) -> SpecialValueTable:
    """Compute every named constant from its defining formula."""
    g = euler_gamma()
    t = SpecialValueTable()
    add = lambda *a: t.entries.append(SpecialValue(*a))
    add("gamma", g, "H_N - log N, Euler-Maclaurin", 1e-12)
    add("S0_half", S(0, 0.5), "S_0(1/2) = (e - I_0(1))/2", 1e-12)
    add("phi1_half", phi(1, 0.5, config=config), "integral of 1/S_1(t) - 1/t over [0, 1/2]", 1e-10)
    add("phi2_half", phi(2, 0.5, config=config), "phi_2(1/2) from its series", 1e-10)
    add("c1", c1(config), "-e(log 2 - gamma - phi_1(1/2))", 1e-10,
        "negative; the magnitude is the commonly quoted 1.89254...")
    add("c2", c2(config), "(e/2)(-log 2 + gamma - phi_1 + 2 phi_2 + 1/S_1 - S_1'/(4 S_1^2)) at 1/2", 1e-8)
    add("v1", v1(0.5, config), "variance constant v_1 at rho = 1/2", 1e-8)
    add("v2", v2(0.5, config), "variance constant v_2 at rho = 1/2", 1e-8)
    return t


def _quad(f, a: float, b: float) -> float:
    return integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]


def reference_constants() -> dict:
    """The same constants by routes that avoid the Taylor machinery.

    ``phi_1``, ``phi_2`` and ``psi_1`` come from quadrature of their integral
    forms; ``S_0`` from the Bessel function ``I_0``; ``gamma`` from numpy.
    ``v_2`` has no such form here, so it is evaluated on the other side of
    the dual expansion (series about 1 instead of 0).
    """
    g = float(np.euler_gamma)
    s1 = lambda t: float(S(1, t))

    def phi2_integrand(x):
        S1 = s1(x)
        return (float(S(2, x)) * float(S_derivative(1, x)) / (2 * S1 ** 3) - float(S(0, x)) / S1 ** 2
                - 1 / (2 * S1) - 1 / (2 * x * x) + 1 / x)

    phi1 = _quad(lambda t: 1 / s1(t) - 1 / t, 0.0, 0.5)
    phi2 = 0.5 - _quad(phi2_integrand, 0.0, 0.5)
    psi1 = _quad(lambda t: float(S(2, t)) / s1(t) ** 3 - 1 / t ** 2 + 2 / t, 0.0, 0.5)
    S1h, dS1h = s1(0.5), float(S_derivative(1, 0.5))
    d1 = 1 / S1h - 2.0  # phi_1'(1/2)
    c2 = (E / 2) * (-math.log(2) + g - phi1 + 2 * phi2 + 1 / S1h - dS1h / (4 * S1h ** 2))
    v1_ref = E * (math.pi ** 2 / 6 - 1) + E * psi1 - phi1 + 2 * E * 0.5 * d1 + E * 0.25 * d1 ** 2
    other = SeriesFamilyConfig(evaluation_switchover=0.25)
    return {
        "gamma": g,
        "S0_half": (E - float(special.i0(1.0))) / 2,
        "phi1_half": phi1,
        "phi2_half": phi2,
        "c1": -E * (math.log(2) - g - phi1),
        "c2": c2,
        "v1": v1_ref,
        "v2": v2(0.5, other),
    }


def check_constants(config: SeriesFamilyConfig = _DEFAULT) -> list:
    """``(name, value, reference, tolerance, ok)`` for every constant."""
    ref = reference_constants()
    out = []
    for e in constants(config).entries:
        r = ref[e.name]
        out.append((e.name, e.value, r, e.tolerance, abs(e.value - r) <= e.tolerance))
    return out
