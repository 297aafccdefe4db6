"""Truncated asymptotic expansions and their residuals against exact data.

The OneMax expansions are in powers of ``1/n`` with coefficient functions of
``alpha = m/n``::

    mu*_{n,m} ~ sum_k (b_k H_m + phi_{k+1}(alpha)) / n^k
    V*_{n,m}  ~ H2_m + sum_k (a_k H_m + psi_k(alpha) + c_k H2_m) / n^k

with ``b = (1, 1, 2/3)``, ``a = (-2, -11/2)`` and ``c = (2, 7/3)``.

:func:`fit_dk` recovers the small-``m`` coefficient rows ``d_k(m)`` from the
exact expansions at ``n = oo`` by an exact linear solve, including the
point corrections ``[m = j]`` that the generic form misses.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TextIO

from . import specfun
from .moments import (
    LeadingOnesParams,
    V_star,
    V_star_laurent,
    harmonic,
    leadingones_moments,
    leadingones_random_start,
    mu_star,
    mu_star_laurent,
)

__all__ = [
    "ExpansionSpec",
    "mu_star_expansion",
    "V_star_expansion",
    "EXn_expansion",
    "EXn_coefficients",
    "VXn_expansion",
    "DkRow",
    "DkReport",
    "fit_dk",
    "LeadingOnesExpansion",
    "leadingones_expansions",
    "leadingones_small_m",
    "leadingones_exact",
    "ResidualReport",
    "residual_report",
]

E = math.e
MU_B = (Fraction(1), Fraction(1), Fraction(2, 3))
V_A = (Fraction(0), Fraction(-2), Fraction(-11, 2))
V_C = (Fraction(1), Fraction(2), Fraction(7, 3))

_K_CAP = {"mu_star": 2, "V_star": 2, "EXn": 1, "VXn": 1, "LO_mean": 1, "LO_var": 0}


@dataclass(frozen=True)
class ExpansionSpec:
    """Which expansion to evaluate and how many ``1/n`` terms to keep."""

    target: str
    K: int = 1
    rho: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.target not in _K_CAP:
            raise ValueError(f"unknown target {self.target!r}")
        if not 0 <= self.K <= _K_CAP[self.target]:
            raise ValueError(f"K={self.K} outside 0..{_K_CAP[self.target]} for {self.target}")

    def evaluate(self, n: int, m: int | None = None, config=specfun._DEFAULT) -> float:
        t = self.target
        if t == "mu_star":
            return mu_star_expansion(n, m, self.K, config)
        if t == "V_star":
            return V_star_expansion(n, m, self.K, config)
        if t == "EXn":
            return EXn_expansion(n, self.rho, self.K, config)
        if t == "VXn":
            return VXn_expansion(n, self.rho, self.K, config)
        ex = leadingones_expansions(n, self.c, m)
        return ex.mean if t == "LO_mean" else ex.variance


def _alpha(n: int, m: int) -> float:
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    return m / n


def mu_star_expansion(n: int, m: int, K: int = 1, config=specfun._DEFAULT) -> float:
    """``sum_{k<=K} (b_k H_m + phi_{k+1}(m/n)) / n^k``."""
    ExpansionSpec("mu_star", K)
    a = _alpha(n, m)
    H = float(harmonic(m))
    return sum((float(MU_B[k]) * H + specfun.phi(k + 1, a, config=config)) / n ** k
               for k in range(K + 1))


def V_star_expansion(n: int, m: int, K: int = 2, config=specfun._DEFAULT) -> float:
    """``H2_m + sum_{1<=k<=K} (a_k H_m + psi_k(m/n) + c_k H2_m) / n^k``.

    Only asserted for ``m >= 2`` when ``K = 2``; smaller ``m`` still evaluates.
    """
    ExpansionSpec("V_star", K)
    a = _alpha(n, m)
    H, H2 = float(harmonic(m)), float(harmonic(m, 2))
    total = H2
    for k in range(1, K + 1):
        total += (float(V_A[k]) * H + specfun.psi(k, a, config=config) + float(V_C[k]) * H2) / n ** k
    return total


def _check_rho(rho) -> float:
    if rho is None or not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    return float(rho)


def EXn_coefficients(rho: float, config=specfun._DEFAULT) -> dict:
    """Coefficients of ``n log n``, ``n``, ``log n`` and ``1`` in ``E(X_n)``."""
    r = _check_rho(rho)
    g = specfun.euler_gamma()
    f = specfun.phi_function(1, config)
    p2 = specfun.phi(2, r, config=config)
    return {
        "nlogn": E,
        "n": E * (math.log(r) + g + f(r)),
        "logn": E / 2,
        "const": E / 2 * (math.log(r) + g + 1 - f(r) + 2 * r * f(r, 1)
                          + r * (1 - r) * f(r, 2) + 2 * p2),
    }


def EXn_expansion(n: int, rho: float, K: int = 1, config=specfun._DEFAULT) -> float:
    """Expected optimization time from a Binomial(n, rho) start, error ``O(log n / n)``
    for ``K = 1``."""
    ExpansionSpec("EXn", K, rho=rho)
    c = EXn_coefficients(rho, config)
    L = math.log(n)
    val = c["nlogn"] * n * L + c["n"] * n
    if K >= 1:
        val += c["logn"] * L + c["const"]
    return val


def VXn_expansion(n: int, rho: float, K: int = 1, config=specfun._DEFAULT) -> float:
    """Variance of the optimization time from a Binomial(n, rho) start."""
    ExpansionSpec("VXn", K, rho=rho)
    r = _check_rho(rho)
    L = math.log(r * n) + specfun.euler_gamma()
    inner = math.pi ** 2 / 6 * E * n - (2 * E + 1) * L + specfun.v1(r, config)
    if K >= 1:
        inner -= ((11 * E + 1) * L - specfun.v2(r, config)) / (2 * n)
    return E * n * inner


# ---------------------------------------------------------------------------
# coefficient fitting


@dataclass
class DkRow:
    """``d_k(m) = sum coeffs[name] * basis(m) + sum corrections[j] [m = j]``."""

    k: int
    coefficients: dict
    valid_from: int
    corrections: dict = field(default_factory=dict)

    def __call__(self, m: int) -> Fraction:
        v = sum((c * _basis(name, m) for name, c in self.coefficients.items()), Fraction(0))
        return v + self.corrections.get(m, Fraction(0))

    def __str__(self) -> str:
        parts = []
        for name, c in self.coefficients.items():
            if c:
                parts.append((c, "" if name == "1" else name))
        for j, c in sorted(self.corrections.items()):
            parts.append((c, f"[m={j}]"))
        if not parts:
            return "0"
        out = ""
        for c, name in parts:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if name and mag == 1:
                term = name
            elif name:
                term = f"{mag}*{name}"
            else:
                term = str(mag)
            out += (f" {sign} " if out else ("-" if sign == "-" else "")) + term
        return out


@dataclass
class DkReport:
    target: str
    rows: list
    m_max: int

    def __getitem__(self, k: int) -> DkRow:
        return self.rows[k]


def _basis(name: str, m: int) -> Fraction:
    if name == "H_m":
        return harmonic(m)
    if name == "H2_m":
        return harmonic(m, 2)
    if name == "1":
        return Fraction(1)
    if name == "m":
        return Fraction(m)
    return Fraction(m) ** int(name.split("^")[1])


def _basis_names(k: int) -> list:
    return ["H_m", "H2_m", "1"] + ["m" if j == 1 else f"m^{j}" for j in range(1, k + 1)]


def _exact_solve(rows: list, rhs: list):
    """Exact solution of an overdetermined linear system, or None if it is
    inconsistent or rank deficient."""
    ncol = len(rows[0])
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    r = 0
    for col in range(ncol):
        piv = next((i for i in range(r, len(A)) if A[i][col] != 0), None)
        if piv is None:
            return None
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][col]
        A[r] = [v * inv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][col] != 0:
                f = A[i][col]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        r += 1
    if any(A[i][-1] != 0 for i in range(r, len(A))):
        return None
    return [A[i][-1] for i in range(ncol)]


def fit_dk(target: str = "mu_star", k_max: int = 2, m_max: int = 12, redundancy: int = 2) -> DkReport:
    """Fit ``d_k(m)`` (``mu_star``) or ``d~_k(m)`` (``V_star``) for ``k = 0..k_max``.

    The basis is ``H_m, H2_m, 1, m, ..., m^k``. For each ``k`` the generic
    form is fitted on ``m = m0..m_max`` for the smallest ``m0`` at which the
    system is consistent with at least ``redundancy`` spare equations; the
    leftover at ``m < m0`` becomes ``[m = j]`` corrections.
    """
    if target not in ("mu_star", "V_star"):
        raise ValueError("target must be mu_star or V_star")
    if not 0 <= k_max <= 4:
        raise ValueError("k_max must lie in 0..4")
    nb = len(_basis_names(k_max))
    if m_max + 1 < nb + redundancy:
        raise ValueError(f"underdetermined: m_max={m_max} too small for k_max={k_max}"
                         f" (need at least {nb + redundancy - 1})")
    table = (mu_star_laurent if target == "mu_star" else V_star_laurent)(m_max, k_max + 1)
    out = []
    for k in range(k_max + 1):
        names = _basis_names(k)
        data = [table[m][k] for m in range(m_max + 1)]
        for m0 in range(m_max + 2 - len(names) - redundancy):
            ms = range(m0, m_max + 1)
            sol = _exact_solve([[_basis(nm, m) for nm in names] for m in ms], [data[m] for m in ms])
            if sol is not None:
                break
        else:
            raise ValueError(f"no consistent fit for k={k} with m_max={m_max}")
        row = DkRow(k, dict(zip(names, sol)), m0)
        row.corrections = {j: data[j] - row(j) for j in range(m0) if data[j] != row(j)}
        row.valid_from = max(row.corrections) + 1 if row.corrections else 0
        out.append(row)
    return DkReport(target, out, m_max)


# ---------------------------------------------------------------------------
# LeadingOnes


@dataclass(frozen=True)
class LeadingOnesExpansion:
    """Leading-order values with the size of the neglected term."""

    mean: float
    variance: float
    mean_error_scale: float
    variance_error_scale: float
    mean_error_order: str
    variance_error_order: str


def leadingones_expansions(n: int, c: float, m: int | None = None) -> LeadingOnesExpansion:
    """Expansions of the LeadingOnes moments for ``p = c/n``.

    With ``m`` given these are uniform in ``alpha = m/n``; with ``m=None`` they
    describe the uniformly random start.
    """
    c = float(c)
    if c <= 0:
        raise ValueError("c must be positive")
    ec, e2c = math.exp(c), math.exp(2 * c)
    if m is None:
        mean = (ec - 1) / (2 * c * c) * n * n + ((c - 2) * ec + 2) / (4 * c) * n
        # leading coefficient 3(e^2c - 1)/(8c^3), as the exact closed form gives
        var = (3 * (e2c - 1) / (8 * c ** 3) * n ** 3
               + (3 * e2c * (2 * c - 3) - 8 * ec + 17) / (16 * c * c) * n * n)
        return LeadingOnesExpansion(mean, var, 1.0, float(n), "O(1)", "O(n)")
    a = _alpha(n, m)
    x = math.exp(-c * a)
    mean = (ec / (2 * c * c) * (1 - x) * n * n
            + ec / (4 * c) * (c - 2 + x * (4 - c + c * a)) * n)
    var = 3 * e2c / (8 * c ** 3) * (1 - x * x) * n ** 3
    return LeadingOnesExpansion(mean, var, c * (c + 1) * ec, e2c * (1 + c) * n * n / (c * c),
                                "O(c(c+1)e^c)", "O(c^-2 e^(2c) (1+c) n^2)")


def leadingones_small_m(n: int, c: float, m: int) -> tuple:
    """First-order equivalents ``((m+1)n/(2c e^-c), (3m+1)n^2/(4c^2 e^-2c))`` for fixed ``m``."""
    c = float(c)
    return ((m + 1) * n / (2 * c * math.exp(-c)),
            (3 * m + 1) * n * n / (4 * c * c * math.exp(-2 * c)))


def leadingones_exact(n: int, c, m: int | None = None) -> tuple:
    """Exact ``(mean, variance)`` as floats, the comparison target for the expansions."""
    params = LeadingOnesParams.from_c(n, c)
    if m is None:
        return tuple(float(v) for v in leadingones_random_start(params))
    mo = leadingones_moments(params, m)
    return float(mo.mean), float(mo.variance)


# ---------------------------------------------------------------------------
# residuals


@dataclass
class ResidualReport:
    """Residuals of a truncated expansion against exact tables.

    The normalized residual is ``|exact - expansion| * n^(K+1) / H_m``. The
    verdict fits ``C`` as the largest normalized residual at the smallest
    ``n`` and passes if no later ``n`` exceeds ``band * C``.
    """

    target: str
    K: int
    rows: list
    band: float = 1.5

    def max_by_n(self) -> dict:
        out = {}
        for n, _, _, z in self.rows:
            out[n] = max(out.get(n, 0.0), z)
        return out

    @property
    def fitted_constant(self) -> float:
        mx = self.max_by_n()
        return mx[min(mx)]

    @property
    def verdict(self) -> bool:
        mx = self.max_by_n()
        C = self.fitted_constant
        return all(math.isfinite(v) and v <= self.band * C for v in mx.values())

    @property
    def nonincreasing(self) -> bool:
        vals = [v for _, v in sorted(self.max_by_n().items())]
        return all(b <= a for a, b in zip(vals, vals[1:]))

    def to_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "m", "residual", "normalized_residual"])
        for n, m, r, z in self.rows:
            w.writerow([n, m, f"{r:.17g}", f"{z:.17g}"])


def residual_report(target: str = "mu_star", K: int = 1, n_values=range(10, 51),
                    m_min: int | None = None, exact: bool = True, band: float = 1.5,
                    config=specfun._DEFAULT) -> ResidualReport:
    """Compare the ``K``-term expansion of ``mu_star`` or ``V_star`` with the exact
    table for every ``n`` in ``n_values`` and ``m_min <= m <= n``.

    ``m_min`` defaults to ``max(1, K)`` for the mean and ``2`` for the variance.
    """
    if target == "mu_star":
        table, expand = mu_star, mu_star_expansion
        m_min = max(1, K) if m_min is None else m_min
    elif target == "V_star":
        table, expand = V_star, V_star_expansion
        m_min = 2 if m_min is None else m_min
    else:
        raise ValueError("target must be mu_star or V_star")
    ExpansionSpec(target, K)
    rows = []
    for n in n_values:
        vals = table(n, m_max=n, exact=exact).values
        for m in range(m_min, n + 1):
            r = float(vals[m]) - expand(n, m, K, config)
            rows.append((n, m, r, abs(r) * n ** (K + 1) / float(harmonic(m))))
    return ResidualReport(target, K, rows, band)
