"""Exact arithmetic building blocks.

Rationals are plain :class:`fractions.Fraction` objects. On top of them this
module provides dense univariate polynomials, reduced rational functions,
expansion of a rational function at infinity, and truncated power series with
either exact or float coefficients.

A :class:`TruncatedSeries` stands for::

    x**valuation * (c[0] + c[1]*x + ... + c[N-1]*x**(N-1) + O(x**N))

where ``x`` is the offset from ``point``. A negative valuation is how poles
such as ``1/S_1(x)`` at the origin are carried through an exact computation.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

ExactRational = Fraction

__all__ = [
    "ExactRational",
    "PoleError",
    "SeriesError",
    "Polynomial",
    "RationalFunction",
    "TruncatedSeries",
    "as_rational",
    "format_rational",
    "rational_arith",
    "ratfun_eval",
    "laurent_at_infinity",
    "series_compose_and_integrate",
    "interpolate",
]


class PoleError(ZeroDivisionError):
    """Raised when a rational function is evaluated at a zero of its denominator."""


class SeriesError(ValueError):
    """Raised for ill-posed series operations (e.g. reciprocal of O(x))."""


def as_rational(value) -> Fraction:
    """Coerce ``value`` to a Fraction. Strings may be ``"p/q"``, integers or decimals."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def rational_arith(a, b, op: str) -> Fraction:
    """Exact ``a op b`` for ``op`` in {add, sub, mul, div}."""
    a, b = as_rational(a), as_rational(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise ZeroDivisionError("rational division by zero")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# polynomials


def _strip(coeffs: list) -> list:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


class Polynomial:
    """Dense polynomial in one symbol with Fraction coefficients.

    ``coeffs[i]`` is the coefficient of ``symbol**i``; trailing zeros are
    removed so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs", "symbol")

    def __init__(self, coeffs: Iterable = (), symbol: str = "n"):
        self.coeffs = tuple(_strip([as_rational(c) for c in coeffs]))
        self.symbol = symbol

    @classmethod
    def _raw(cls, coeffs: list, symbol: str) -> "Polynomial":
        p = object.__new__(cls)
        p.coeffs = tuple(_strip(coeffs))
        p.symbol = symbol
        return p

    @classmethod
    def monomial(cls, degree: int, coeff=1, symbol: str = "n") -> "Polynomial":
        return cls([0] * degree + [coeff], symbol)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other], self.symbol)

    def __add__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial._raw(out, self.symbol)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw([-c for c in self.coeffs], self.symbol)

    def __sub__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        if not isinstance(other, Polynomial):
            k = as_rational(other)
            return Polynomial._raw([c * k for c in self.coeffs], self.symbol)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial._raw([], self.symbol)
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Polynomial._raw(out, self.symbol)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial([1], self.symbol)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other: "Polynomial"):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        lead = other.leading
        if len(rem) - 1 < db:
            return Polynomial._raw([], self.symbol), Polynomial._raw(rem, self.symbol)
        quo = [Fraction(0)] * (len(rem) - db)
        bc = other.coeffs
        for k in range(len(rem) - 1 - db, -1, -1):
            c = rem[k + db] / lead
            quo[k] = c
            if c:
                for j in range(db + 1):
                    rem[k + j] -= c * bc[j]
        return Polynomial._raw(quo, self.symbol), Polynomial._raw(rem[:db], self.symbol)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Polynomial([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, int) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def evaluate(self, x):
        return self(x)

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        return self * (1 / self.leading)

    def derivative(self) -> "Polynomial":
        return Polynomial._raw([i * c for i, c in enumerate(self.coeffs)][1:], self.symbol)

    def integer_form(self) -> tuple["Polynomial", Fraction]:
        """Return ``(P, s)`` with ``self = s*P``, ``P`` primitive with integer coefficients
        and a positive leading coefficient."""
        if self.is_zero():
            return self, Fraction(1)
        den = math.lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = math.gcd(*ints)
        if ints[-1] < 0:
            g = -g
        return Polynomial._raw([Fraction(i // g) for i in ints], self.symbol), Fraction(g, den)

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            if i == 0:
                body = format_rational(a)
            else:
                mono = self.symbol if i == 1 else f"{self.symbol}^{i}"
                body = mono if a == 1 else f"{format_rational(a)}{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd by Euclid's algorithm over the rationals."""
    while not b.is_zero():
        a, b = b, (a % b).monic()
    return a.monic() if not a.is_zero() else a


def interpolate(xs: Sequence, ys: Sequence, symbol: str = "n") -> Polynomial:
    """Newton interpolation through the points ``(xs[i], ys[i])`` (exact)."""
    xs = [as_rational(x) for x in xs]
    coef = [as_rational(y) for y in ys]
    k = len(xs)
    for j in range(1, k):
        for i in range(k - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = Polynomial([coef[-1]], symbol)
    for i in range(k - 2, -1, -1):
        poly = poly * Polynomial([-xs[i], 1], symbol) + coef[i]
    return poly


# ---------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """Reduced quotient of two polynomials.

    Canonical storage: ``gcd(numerator, denominator) = 1`` and a monic
    denominator, so two equal functions have identical coefficients.
    :meth:`integer_form` gives the integer-coefficient presentation used for
    display.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator=None, symbol: str = "n", _reduced: bool = False):
        if not isinstance(numerator, Polynomial):
            numerator = Polynomial([numerator], symbol)
        if denominator is None:
            denominator = Polynomial([1], numerator.symbol)
        elif not isinstance(denominator, Polynomial):
            denominator = Polynomial([denominator], numerator.symbol)
        if denominator.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            if numerator.is_zero():
                denominator = Polynomial([1], numerator.symbol)
            else:
                g = poly_gcd(numerator, denominator)
                if g.degree > 0:
                    numerator = numerator // g
                    denominator = denominator // g
            lead = denominator.leading
            if lead != 1:
                numerator = numerator * (1 / lead)
                denominator = denominator * (1 / lead)
        self.numerator = numerator
        self.denominator = denominator

    @property
    def symbol(self) -> str:
        return self.numerator.symbol

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other, Polynomial([1], other.symbol), _reduced=True)
        return RationalFunction(Polynomial([other], self.symbol), Polynomial([1], self.symbol), _reduced=True)

    def __add__(self, other):
        o = self._coerce(other)
        if self.denominator == o.denominator:
            return RationalFunction(self.numerator + o.numerator, self.denominator)
        return RationalFunction(self.numerator * o.denominator + o.numerator * self.denominator,
                                self.denominator * o.denominator)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.numerator, self.denominator, _reduced=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        # cross-cancel before multiplying to keep degrees down
        g1 = poly_gcd(self.numerator, o.denominator) if not self.numerator.is_zero() else None
        g2 = poly_gcd(o.numerator, self.denominator) if not o.numerator.is_zero() else None
        a, d2 = self.numerator, o.denominator
        b, d1 = o.numerator, self.denominator
        if g1 is not None and g1.degree > 0:
            a, d2 = a // g1, d2 // g1
        if g2 is not None and g2.degree > 0:
            b, d1 = b // g2, d1 // g2
        num, den = a * b, d1 * d2
        lead = den.leading
        return RationalFunction(num * (1 / lead), den * (1 / lead), _reduced=True)

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalFunction":
        if self.numerator.is_zero():
            raise ZeroDivisionError("reciprocal of the zero rational function")
        return RationalFunction(self.denominator, self.numerator, _reduced=False)

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __eq__(self, other):
        if isinstance(other, (RationalFunction, Polynomial, int, Fraction)):
            o = self._coerce(other)
            if not isinstance(other, RationalFunction):
                o = RationalFunction(o.numerator, o.denominator)
            return self.numerator == o.numerator and self.denominator == o.denominator
        return NotImplemented

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def __call__(self, n):
        return ratfun_eval(self, n)

    def integer_form(self) -> tuple[Polynomial, Polynomial]:
        """Numerator and denominator with integer coefficients, the denominator
        primitive with positive leading coefficient."""
        num_p, num_s = self.numerator.integer_form()
        den_p, den_s = self.denominator.integer_form()
        scale = num_s / den_s
        num = num_p * scale
        # make the numerator integral by moving its denominator into den
        d = math.lcm(*(c.denominator for c in num.coeffs)) if num.coeffs else 1
        return num * d, den_p * d

    def polynomial_part(self) -> tuple[Polynomial, "RationalFunction"]:
        q, r = divmod(self.numerator, self.denominator)
        return q, RationalFunction(r, self.denominator, _reduced=True)

    def __str__(self):
        num, den = self.integer_form()
        if den.degree == 0 and den.leading == 1:
            return str(num)
        return f"({num})/({den})"

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"


def ratfun_eval(f: RationalFunction, n) -> Fraction:
    """Exact value ``f(n)``; raises :class:`PoleError` at a pole."""
    n = as_rational(n)
    den = f.denominator(n)
    if den == 0:
        raise PoleError(f"denominator vanishes at n={n}")
    return Fraction(f.numerator(n)) / den


def laurent_at_infinity(f: RationalFunction, order: int = 12) -> "TruncatedSeries":
    """Coefficients of ``n**0, n**-1, ..., n**-(order-1)`` of ``f`` as n -> oo.

    The result is a series in ``u = 1/n`` at ``u = 0``. A rational function
    with a nonzero polynomial part is rejected; split it off first with
    :meth:`RationalFunction.polynomial_part`.
    """
    if order < 1:
        raise ValueError("order must be positive")
    num, den = f.numerator, f.denominator
    if num.is_zero():
        return TruncatedSeries([Fraction(0)] * order, variable="1/n")
    shift = den.degree - num.degree
    if shift < 0:
        raise ValueError("rational function has a polynomial part; use polynomial_part()")
    # f = u**shift * rev(num)(u) / rev(den)(u), with rev the reversed coefficient list
    rnum = list(reversed(num.coeffs))
    rden = list(reversed(den.coeffs))
    out = []
    rem = rnum + [Fraction(0)] * order
    lead = rden[0]
    for k in range(order - shift):
        c = rem[k] / lead
        out.append(c)
        if c:
            for j in range(1, len(rden)):
                if k + j < len(rem):
                    rem[k + j] -= c * rden[j]
    coeffs = [Fraction(0)] * min(shift, order) + out
    return TruncatedSeries(coeffs[:order], variable="1/n")


# ---------------------------------------------------------------------------
# truncated power series


def _zero_like(c):
    return c * 0


class TruncatedSeries:
    """Truncated power (or Laurent) series about ``point``.

    Arithmetic between two series needs the same expansion point; the result
    keeps only as many terms as both operands determine.
    """

    __slots__ = ("coefficients", "variable", "point", "valuation")

    def __init__(self, coefficients: Iterable, variable: str = "x", point=0, valuation: int = 0):
        self.coefficients = tuple(Fraction(c) if type(c) is int else c for c in coefficients)
        self.variable = variable
        self.point = point
        self.valuation = valuation

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, value, order: int, point=0, variable: str = "x") -> "TruncatedSeries":
        zero = _zero_like(value)
        return cls([value] + [zero] * (order - 1), variable, point)

    @classmethod
    def polynomial(cls, coeffs: Sequence, order: int, point=0, variable: str = "x") -> "TruncatedSeries":
        """An exactly known polynomial, zero padded to ``order`` terms."""
        coeffs = list(coeffs)
        if len(coeffs) > order:
            raise SeriesError("polynomial does not fit in the requested order")
        zero = _zero_like(coeffs[0]) if coeffs else Fraction(0)
        return cls(coeffs + [zero] * (order - len(coeffs)), variable, point)

    @classmethod
    def identity(cls, order: int, point=0, variable: str = "x", one=Fraction(1)) -> "TruncatedSeries":
        """The local coordinate ``x`` itself (valuation 1)."""
        return cls([one] * 1 + [one * 0] * (order - 1), variable, point, valuation=1)

    # -- basic properties ---------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.coefficients)

    @property
    def precision(self) -> int:
        """Absolute precision: the series is known modulo ``x**precision``."""
        return self.valuation + len(self.coefficients)

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, k: int):
        """Coefficient of ``x**k`` (absolute power)."""
        i = k - self.valuation
        if i < 0:
            return _zero_like(self.coefficients[0]) if self.coefficients else 0
        if i >= len(self.coefficients):
            raise IndexError(f"coefficient of x^{k} is beyond the truncation order")
        return self.coefficients[i]

    def _like(self, coeffs, valuation: int) -> "TruncatedSeries":
        return TruncatedSeries(coeffs, self.variable, self.point, valuation)

    def _check(self, other: "TruncatedSeries"):
        if self.point != other.point:
            raise SeriesError("series expanded at different points")

    def normalized(self) -> "TruncatedSeries":
        """Drop leading coefficients that are exactly zero."""
        c = list(self.coefficients)
        v = self.valuation
        while c and c[0] == 0:
            c.pop(0)
            v += 1
        return self._like(c, v)

    def plain(self) -> list:
        """Coefficients ``c_0 .. c_{precision-1}`` of an ordinary power series."""
        s = self
        if s.valuation < 0:
            s = s.normalized()
            if s.valuation < 0:
                raise SeriesError("series has a pole at the expansion point")
        zero = _zero_like(s.coefficients[0]) if s.coefficients else Fraction(0)
        return [zero] * s.valuation + list(s.coefficients)

    def as_power_series(self) -> "TruncatedSeries":
        return self._like(self.plain(), 0)

    def truncate(self, precision: int) -> "TruncatedSeries":
        """Keep terms below ``x**precision``."""
        keep = max(0, min(len(self.coefficients), precision - self.valuation))
        return self._like(self.coefficients[:keep], self.valuation)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            if other == 0:
                return self
            other = TruncatedSeries.constant(other, max(self.precision, 1), self.point, self.variable)
        self._check(other)
        v = min(self.valuation, other.valuation)
        prec = min(self.precision, other.precision)
        if prec <= v:
            return self._like([], v)
        zero = _zero_like((self.coefficients or other.coefficients)[0])
        out = [zero] * (prec - v)
        for s in (self, other):
            for i, c in enumerate(s.coefficients):
                k = s.valuation + i - v
                if k >= len(out):
                    break
                out[k] = out[k] + c
        return self._like(out, v)

    __radd__ = __add__

    def __neg__(self):
        return self._like([-c for c in self.coefficients], self.valuation)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self._like([c * other for c in self.coefficients], self.valuation)
        self._check(other)
        a, b = self.coefficients, other.coefficients
        n = min(len(a), len(b))
        if n == 0:
            return self._like([], self.valuation + other.valuation)
        out = []
        for k in range(n):
            acc = a[0] * b[k]
            for i in range(1, k + 1):
                acc += a[i] * b[k - i]
            out.append(acc)
        return self._like(out, self.valuation + other.valuation)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal(allow_pole=True) ** (-k)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            base = base * base
            k >>= 1
        if result is None:
            one = (self.coefficients[0] ** 0) if self.coefficients else Fraction(1)
            return TruncatedSeries.constant(one, len(self.coefficients), self.point, self.variable)
        return result

    def reciprocal(self, allow_pole: bool = False) -> "TruncatedSeries":
        """``1/self``. A vanishing constant term is an error unless ``allow_pole``."""
        s = self.normalized()
        if not s.coefficients:
            raise SeriesError("reciprocal of a series that is zero to working precision")
        if s.valuation > 0 and not allow_pole:
            raise SeriesError("reciprocal of a series with zero constant term")
        a = s.coefficients
        n = len(a)
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, n):
            acc = a[1] * out[k - 1]
            for i in range(2, k + 1):
                acc += a[i] * out[k - i]
            out.append(-acc * inv0)
        return self._like(out, -s.valuation)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal(allow_pole=True)
        return self._like([c / other for c in self.coefficients], self.valuation)

    def __rtruediv__(self, other):
        return self.reciprocal(allow_pole=True) * other

    # -- calculus -----------------------------------------------------------
    def derivative(self) -> "TruncatedSeries":
        out = [(self.valuation + i) * c for i, c in enumerate(self.coefficients)]
        if self.valuation == 0:
            return self._like(out[1:], 0)
        return self._like(out, self.valuation - 1)

    def integrate(self, constant=0) -> "TruncatedSeries":
        """Termwise antiderivative ``c_j x^j -> c_j x^(j+1)/(j+1)`` plus ``constant``."""
        coeffs = self.plain()
        zero = _zero_like(coeffs[0]) if coeffs else Fraction(0)
        out = [zero + constant] + [c / (j + 1) for j, c in enumerate(coeffs)]
        return self._like(out, 0)

    def shift_point(self, delta) -> "TruncatedSeries":
        """Re-expand the truncated polynomial about ``point + delta`` (Taylor shift)."""
        c = self.plain()
        n = len(c)
        out = list(c)
        # repeated synthetic division by (y - (-delta)) style Horner steps
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                out[j] = out[j] + delta * out[j + 1]
        return TruncatedSeries(out, self.variable, self.point + delta, 0)

    def evaluate(self, x):
        """Sum of the retained terms at offset ``x`` from the expansion point."""
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        if self.valuation:
            acc = acc * x ** self.valuation
        return acc

    __call__ = evaluate

    def map(self, func) -> "TruncatedSeries":
        return self._like([func(c) for c in self.coefficients], self.valuation)

    def __repr__(self):
        return (f"TruncatedSeries({list(self.coefficients)!r}, variable={self.variable!r}, "
                f"point={self.point!r}, valuation={self.valuation})")


def series_compose_and_integrate(s: TruncatedSeries, mode: str, other=None, **kwargs) -> TruncatedSeries:
    """Dispatch one of the series operations by name.

    ``mode`` is one of ``reciprocal``, ``multiply`` (needs ``other``),
    ``integrate_termwise`` (optional ``constant``) and ``shift_point``
    (``other`` is the shift).
    """
    if mode == "reciprocal":
        return s.reciprocal(allow_pole=kwargs.get("allow_pole", False))
    if mode == "multiply":
        if other is None:
            raise ValueError("multiply needs a second series")
        return s * other
    if mode == "integrate_termwise":
        return s.integrate(kwargs.get("constant", 0))
    if mode == "shift_point":
        if other is None:
            raise ValueError("shift_point needs a shift")
        return s.shift_point(other)
    raise ValueError(f"unknown series mode {mode!r}")
