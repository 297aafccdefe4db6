"""One-step transition probabilities of the (1+1)-EA on OneMax.

From a string with ``m`` zero bits, standard bit mutation with rate ``1/n``
followed by elitist (``>=``) selection reaches deficit ``m - l`` with
probability ``lambda_{n,m,l}``. Flipping ``j + l`` of the zeros and ``j`` of
the ones gives

    lambda_{n,m,l} = sum_j C(n-m, j) C(m, j+l) (1/n)^(2j+l) (1-1/n)^(n-2j-l).

The normalized kernel ``lambda*_{n,m,l} = lambda_{n+1,m,l} / e_n`` with
``e_n = (1 - 1/(n+1))^(n+1)`` has the simpler form
``sum_j C(n+1-m, j) C(m, j+l) n^(-l-2j)``, which is what the moment
recurrences use.
"""

from __future__ import annotations

import csv
import math
from fractions import Fraction
from typing import TextIO

__all__ = [
    "e_n",
    "lam",
    "lambda_",
    "lambda_star",
    "row_sum",
    "weighted_row_sum",
    "TransitionKernel",
]


def _check_indices(n: int, m: int, ell: int, m_max: int) -> None:
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if not 0 <= m <= m_max:
        raise ValueError(f"deficit m={m} outside 0..{m_max}")
    if ell < 1:
        raise ValueError(f"jump size must be >= 1, got {ell}")


def _log_binom(a: int, b: int) -> float:
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def e_n(n: int, exact: bool = True):
    """``(1 - 1/(n+1))**(n+1)``."""
    if exact:
        return Fraction(n, n + 1) ** (n + 1)
    return math.exp((n + 1) * math.log1p(-1.0 / (n + 1)))


def lam(n: int, m: int, ell: int, exact: bool = True):
    """Probability that one step moves deficit ``m`` to ``m - ell`` (rate 1/n).

    Zero for ``ell > m``.
    """
    _check_indices(n, m, ell, n)
    if ell > m:
        return Fraction(0) if exact else 0.0
    jmax = min(n - m, m - ell)
    if exact:
        # common denominator n**n; numerator is an integer
        num = 0
        for j in range(jmax + 1):
            num += math.comb(n - m, j) * math.comb(m, j + ell) * (n - 1) ** (n - 2 * j - ell)
        return Fraction(num, n ** n)
    if n == 1:
        return 1.0
    logp = -math.log(n)
    logq = math.log1p(-1.0 / n)
    total = 0.0
    for j in range(jmax + 1):
        total += math.exp(_log_binom(n - m, j) + _log_binom(m, j + ell)
                          + (2 * j + ell) * logp + (n - 2 * j - ell) * logq)
    return total


lambda_ = lam


def lambda_star(n: int, m: int, ell: int, exact: bool = True):
    """Normalized kernel ``lambda_{n+1,m,ell} / e_n``; defined for ``m <= n + 1``."""
    _check_indices(n, m, ell, n + 1)
    if ell > m:
        return Fraction(0) if exact else 0.0
    jmax = min(n + 1 - m, m - ell)
    if exact:
        # scale by n**(ell + 2*jmax) to stay in integers
        top = ell + 2 * jmax
        num = 0
        for j in range(jmax + 1):
            num += math.comb(n + 1 - m, j) * math.comb(m, j + ell) * n ** (top - ell - 2 * j)
        return Fraction(num, n ** top)
    logn = math.log(n)
    total = 0.0
    for j in range(jmax + 1):
        total += math.exp(_log_binom(n + 1 - m, j) + _log_binom(m, j + ell) - (ell + 2 * j) * logn)
    return total


def row_sum(n: int, m: int, exact: bool = True):
    """``Lambda_{n,m}``, the probability of any improvement from deficit ``m``."""
    zero = Fraction(0) if exact else 0.0
    return sum((lam(n, m, ell, exact) for ell in range(1, m + 1)), zero)


def weighted_row_sum(n: int, m: int, r: int, exact: bool = True):
    """``sum_l l**r * lambda*_{n,m,l}`` for ``0 <= r <= 4``."""
    if not 0 <= r <= 4:
        raise ValueError(f"weighted row sums are supported for r in 0..4, got {r}")
    zero = Fraction(0) if exact else 0.0
    return sum((ell ** r * lambda_star(n, m, ell, exact) for ell in range(1, m + 1)), zero)


class TransitionKernel:
    """Rows of the OneMax kernel for a fixed ``n``, built lazily.

    Parameters
    ----------
    n : int
        String length.
    carrier : {"exact", "float"}
        Fractions or binary floats.
    normalized : bool
        If true the entries are ``lambda*_{n,m,l}`` instead of ``lambda_{n,m,l}``.
    """

    def __init__(self, n: int, carrier: str = "exact", normalized: bool = False):
        if carrier not in ("exact", "float"):
            raise ValueError(f"unknown carrier {carrier!r}")
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.carrier = carrier
        self.normalized = normalized
        self._rows: dict[int, tuple] = {}

    @property
    def exact(self) -> bool:
        return self.carrier == "exact"

    @property
    def m_max(self) -> int:
        return self.n

    def row(self, m: int) -> tuple:
        """Entries for ``l = 1..m`` (index ``l - 1``)."""
        if not 0 <= m <= self.m_max:
            raise ValueError(f"deficit m={m} outside 0..{self.m_max}")
        r = self._rows.get(m)
        if r is None:
            f = lambda_star if self.normalized else lam
            r = tuple(f(self.n, m, ell, self.exact) for ell in range(1, m + 1))
            self._rows[m] = r
        return r

    def entry(self, m: int, ell: int):
        if ell < 1:
            raise ValueError("jump size must be >= 1")
        if ell > m:
            return Fraction(0) if self.exact else 0.0
        return self.row(m)[ell - 1]

    def row_sum(self, m: int):
        return sum(self.row(m), Fraction(0) if self.exact else 0.0)

    def weighted_row_sum(self, m: int, r: int):
        return sum((ell ** r * v for ell, v in enumerate(self.row(m), start=1)),
                   Fraction(0) if self.exact else 0.0)

    def materialize(self) -> "TransitionKernel":
        for m in range(1, self.m_max + 1):
            self.row(m)
        return self

    def to_csv(self, fh: TextIO) -> None:
        """Write ``n,m,ell,lambda_numer,lambda_denom`` (exact) or ``n,m,ell,lambda``."""
        w = csv.writer(fh, lineterminator="\n")
        if self.exact:
            w.writerow(["n", "m", "ell", "lambda_numer", "lambda_denom"])
        else:
            w.writerow(["n", "m", "ell", "lambda"])
        for m in range(1, self.m_max + 1):
            for ell, v in enumerate(self.row(m), start=1):
                if self.exact:
                    w.writerow([self.n, m, ell, v.numerator, v.denominator])
                else:
                    w.writerow([self.n, m, ell, f"{float(v):.17g}"])
