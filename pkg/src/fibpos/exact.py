"""Exact rational arithmetic helpers and univariate polynomials over Q.

Rationals are plain :class:`fractions.Fraction` values; this module adds the
string codec used by every JSON document, a small immutable polynomial type
and an order-annotated polynomial for asymptotic bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence, Union

Rational = Fraction
RationalLike = Union[int, Fraction, str]


def Q(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected: they cannot be round-tripped exactly.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    num, sep, den = text.partition("/")
    try:
        if sep:
            return Fraction(int(num), int(den))
        return Fraction(int(num))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {text!r}") from exc


def format_rational(q: RationalLike) -> str:
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def sign(q: RationalLike) -> int:
    q = Q(q)
    return (q > 0) - (q < 0)


def binomial(n: int, k: int) -> int:
    """Binomial coefficient, 0 when ``k > n``."""
    if n < 0 or k < 0:
        raise ValueError("binomial arguments must be nonnegative")
    return math.comb(n, k)


@dataclass(frozen=True)
class Poly:
    """Polynomial with rational coefficients in one formal variable.

    ``coeffs[i]`` is the coefficient of ``x**i``; trailing zeros are stripped
    so the zero polynomial has ``coeffs == ()``.
    """

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        cs = [Q(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def of(cls, *coeffs: RationalLike) -> Poly:
        return cls(tuple(Q(c) for c in coeffs))

    @classmethod
    def constant(cls, c: RationalLike) -> Poly:
        return cls((Q(c),))

    @classmethod
    def monomial(cls, c: RationalLike, power: int) -> Poly:
        if power < 0:
            raise ValueError("negative power")
        return cls((Fraction(0),) * power + (Q(c),))

    @classmethod
    def x(cls) -> Poly:
        return cls.monomial(1, 1)

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def valuation(self) -> int | None:
        """Lowest power with nonzero coefficient, None for zero."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return None

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coefficient(self, power: int) -> Fraction:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return Fraction(0)

    def __call__(self, x: RationalLike) -> Fraction:
        return poly_eval(self, x)

    def _coerce(self, other: object) -> Poly | None:
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.constant(other)
        return None

    def __add__(self, other: object) -> Poly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly(tuple(self.coefficient(i) + o.coefficient(i) for i in range(n)))

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: object) -> Poly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> Poly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> Poly:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative exponent")
        out = Poly.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def truncate_below(self, power: int) -> Poly:
        """Drop every term of degree >= ``power``."""
        return Poly(self.coeffs[: max(power, 0)])

    def truncate_above(self, power: int) -> Poly:
        """Drop every term of degree <= ``power``."""
        return Poly(tuple(Fraction(0) if i <= power else c for i, c in enumerate(self.coeffs)))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = format_rational(abs(c))
            if i == 0:
                body = mag
            else:
                var = "x" if i == 1 else f"x^{i}"
                body = var if mag == "1" else f"{mag}*{var}"
            parts.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def poly_eval(p: Poly, x: RationalLike) -> Fraction:
    """Horner evaluation."""
    x = Q(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def poly_eventual_sign(p: Poly) -> int:
    """Sign of ``p(x)`` for all sufficiently large ``x``: +1, 0 or -1."""
    return sign(p.leading())


def cauchy_root_bound(p: Poly) -> Fraction:
    """Every real root of ``p`` lies strictly inside ``(-B, B)``."""
    if p.degree <= 0:
        return Fraction(1)
    lead = p.leading()
    return 1 + max(abs(c / lead) for c in p.coeffs[:-1])


def limit_at_infinity(num: Poly, den: Poly) -> Fraction:
    """Exact limit of ``num(x)/den(x)`` as ``x -> +inf``.

    Raises ``ValueError`` when the limit is infinite or ``den`` is zero.
    """
    if den.is_zero():
        raise ValueError("zero denominator")
    if num.is_zero() or num.degree < den.degree:
        return Fraction(0)
    if num.degree > den.degree:
        raise ValueError("rational function diverges at infinity")
    return num.leading() / den.leading()


_INF = math.inf


@dataclass(frozen=True)
class BigOPoly:
    """Polynomial plus an order term ``O(x**order)``.

    ``at_infinity`` selects the asymptotic regime. As ``x -> inf`` the O-term
    swallows every power ``<= order``; as ``x -> 0`` it swallows every power
    ``>= order``. ``order=None`` means the expression is exact.
    """

    exact: Poly = Poly()
    order: int | None = None
    at_infinity: bool = True

    def __post_init__(self) -> None:
        if self.order is None:
            return
        if self.at_infinity:
            trimmed = self.exact.truncate_above(self.order)
        else:
            trimmed = self.exact.truncate_below(self.order)
        object.__setattr__(self, "exact", trimmed)

    def _check(self, other: BigOPoly) -> None:
        if self.at_infinity != other.at_infinity:
            raise ValueError("cannot combine expansions at 0 and at infinity")

    def _merge_orders(self, *orders: float) -> int | None:
        if self.at_infinity:
            best = max(orders, default=-_INF)
        else:
            best = min(orders, default=_INF)
        if best in (_INF, -_INF):
            return None
        return int(best)

    def _order_value(self) -> float:
        if self.order is None:
            return -_INF if self.at_infinity else _INF
        return self.order

    def __add__(self, other: object) -> BigOPoly:
        if isinstance(other, Poly):
            other = BigOPoly(other, None, self.at_infinity)
        if not isinstance(other, BigOPoly):
            return NotImplemented
        self._check(other)
        order = self._merge_orders(self._order_value(), other._order_value())
        return BigOPoly(self.exact + other.exact, order, self.at_infinity)

    __radd__ = __add__

    def scale(self, c: RationalLike) -> BigOPoly:
        c = Q(c)
        if c == 0:
            return BigOPoly(Poly(), None, self.at_infinity)
        return BigOPoly(self.exact * c, self.order, self.at_infinity)

    def __neg__(self) -> BigOPoly:
        return self.scale(-1)

    def __sub__(self, other: object) -> BigOPoly:
        if isinstance(other, Poly):
            other = BigOPoly(other, None, self.at_infinity)
        if not isinstance(other, BigOPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: object) -> BigOPoly:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if isinstance(other, Poly):
            other = BigOPoly(other, None, self.at_infinity)
        if not isinstance(other, BigOPoly):
            return NotImplemented
        self._check(other)
        a, b = self._order_value(), other._order_value()
        if self.at_infinity:
            # (A + O(x^a))(B + O(x^b)) = AB + O(x^max(a + deg B, b + deg A, a + b))
            da = self.exact.degree if not self.exact.is_zero() else -_INF
            db = other.exact.degree if not other.exact.is_zero() else -_INF
            cross = (a + db, b + da, a + b)
        else:
            va = self.exact.valuation
            vb = other.exact.valuation
            va = _INF if va is None else va
            vb = _INF if vb is None else vb
            cross = (a + vb, b + va, a + b)
        cross = tuple(c for c in cross if not math.isnan(c))
        order = self._merge_orders(*cross)
        return BigOPoly(self.exact * other.exact, order, self.at_infinity)

    __rmul__ = __mul__

    def divide_by_power(self, k: int) -> BigOPoly:
        """Divide by ``x**k`` (``x -> inf`` only); the order may go negative.

        Exact terms of degree < k would become negative powers; those are
        absorbed when they already fall under the shifted O-term, and rejected
        otherwise.
        """
        if not self.at_infinity:
            raise ValueError("division by a power is only supported at infinity")
        new_order = None if self.order is None else self.order - k
        coeffs = self.exact.coeffs
        for i in range(min(k, len(coeffs))):
            if coeffs[i] != 0 and (new_order is None or i - k > new_order):
                raise ValueError("division leaves a negative-power exact term")
        return BigOPoly(Poly(coeffs[k:]), new_order, True)

    def limit(self) -> Fraction:
        """Limit as ``x -> inf``; needs a bounded exact part and order < 0."""
        if not self.at_infinity:
            raise ValueError("limit is only defined for expansions at infinity")
        if self.exact.degree > 0:
            raise ValueError("expansion diverges")
        if self.order is not None and self.order >= 0:
            raise ValueError("O-term does not vanish in the limit")
        return self.exact.coefficient(0)

    def __str__(self) -> str:
        if self.order is None:
            return str(self.exact)
        tail = f"O(x^{self.order})"
        return tail if self.exact.is_zero() else f"{self.exact} + {tail}"


def poly_from_roots(roots: Iterable[RationalLike], lead: RationalLike = 1) -> Poly:
    p = Poly.constant(lead)
    for r in roots:
        p = p * Poly.of(-Q(r), 1)
    return p


def as_fractions(values: Sequence[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(Q(v) for v in values)
