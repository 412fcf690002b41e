"""Exact truncated Laurent series in q.

A QSeries stores integer numerators over one common positive denominator for the
exponent window lo <= e < hi. Coefficients at or beyond hi are unknown and are
never reported. The exact zero series has hi = math.inf.
"""

import logging
import math
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

import msgspec

from core.errors import InsufficientOrder, LeadingZero, RankforgeError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


class SeriesPayload(msgspec.Struct):
    lo: int
    hi: Optional[int]
    coeffs: list[str]


class Mismatch(msgspec.Struct):
    exponent: int
    lhs: str
    rhs: str


class SeriesComparison(msgspec.Struct):
    equal: bool
    order: int
    first_mismatch: Optional[Mismatch] = None

    def __bool__(self):
        return self.equal


class QSeries:
    __slots__ = ("lo", "hi", "_nums", "den")

    def __init__(self, lo: int, hi, nums: Iterable[int] = (), den: int = 1):
        nums = tuple(nums)
        if hi == math.inf:
            if any(nums):
                raise RankforgeError("only the zero series may have an unbounded window")
            nums, lo, den = (), 0, 1
        elif hi < lo or len(nums) != hi - lo:
            raise RankforgeError(f"window [{lo}, {hi}) does not match {len(nums)} coefficients")
        if den == 0:
            raise ZeroDivisionError("series denominator is zero")
        if den < 0:
            nums, den = tuple(-x for x in nums), -den
        g = den
        for x in nums:
            if g == 1:
                break
            g = math.gcd(g, x)
        if g > 1:
            nums, den = tuple(x // g for x in nums), den // g
        self.lo = lo
        self.hi = hi
        self._nums = nums
        self.den = den

    # constructors

    @classmethod
    def zero(cls) -> "QSeries":
        return cls(0, math.inf)

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Number], lo: int = 0, hi: Optional[int] = None) -> "QSeries":
        values = [_as_fraction(c) for c in coeffs]
        if hi is None:
            hi = lo + len(values)
        if hi - lo < len(values):
            values = values[: hi - lo]
        values += [Fraction(0)] * (hi - lo - len(values))
        den = 1
        for v in values:
            den = den * v.denominator // math.gcd(den, v.denominator)
        return cls(lo, hi, (v.numerator * (den // v.denominator) for v in values), den)

    @classmethod
    def monomial(cls, coeff: Number, exponent: int, hi: int) -> "QSeries":
        coeff = _as_fraction(coeff)
        if hi <= exponent:
            return cls(hi, hi)
        nums = [0] * (hi - exponent)
        nums[0] = coeff.numerator
        return cls(exponent, hi, nums, coeff.denominator)

    @classmethod
    def one(cls, hi: int) -> "QSeries":
        return cls.monomial(1, 0, hi)

    # inspection

    @property
    def is_zero(self) -> bool:
        return self.hi == math.inf

    @property
    def numerators(self) -> tuple:
        return self._nums

    @property
    def coeffs(self) -> tuple:
        return tuple(Fraction(x, self.den) for x in self._nums)

    def coefficient(self, exponent: int) -> Fraction:
        if exponent >= self.hi:
            raise InsufficientOrder(exponent + 1, self.hi)
        if exponent < self.lo or self.is_zero:
            return Fraction(0)
        return Fraction(self._nums[exponent - self.lo], self.den)

    __getitem__ = coefficient

    def items(self) -> Iterator[tuple]:
        for i, x in enumerate(self._nums):
            if x:
                yield self.lo + i, Fraction(x, self.den)

    def valuation(self) -> Optional[int]:
        for i, x in enumerate(self._nums):
            if x:
                return self.lo + i
        return None

    def is_integral(self) -> bool:
        return self.den == 1

    # ring operations

    def __add__(self, other):
        if not isinstance(other, QSeries):
            if self.is_zero:
                raise RankforgeError("cannot add a scalar to the exact zero series without an order")
            other = QSeries.monomial(other, 0, max(self.hi, 1))
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo, hi = min(self.lo, other.lo), min(self.hi, other.hi)
        den = self.den * other.den // math.gcd(self.den, other.den)
        fa, fb = den // self.den, den // other.den
        nums = [0] * (hi - lo)
        for src, f in ((self, fa), (other, fb)):
            off = src.lo - lo
            for i, x in enumerate(src._nums[: max(0, hi - src.lo)]):
                nums[off + i] += x * f
        return QSeries(lo, hi, nums, den)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        return QSeries(self.lo, self.hi, (-x for x in self._nums), self.den)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Number) -> "QSeries":
        c = _as_fraction(c)
        if self.is_zero or c == 0:
            return QSeries.zero()
        return QSeries(self.lo, self.hi, (x * c.numerator for x in self._nums), self.den * c.denominator)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        if self.is_zero or other.is_zero:
            return QSeries.zero()
        lo = self.lo + other.lo
        hi = min(self.hi + other.lo, other.hi + self.lo)
        size = hi - lo
        out = [0] * size
        b = other._nums
        for i, x in enumerate(self._nums[:size]):
            if not x:
                continue
            for j, y in enumerate(b[: size - i]):
                if y:
                    out[i + j] += x * y
        return QSeries(lo, hi, out, self.den * other.den)

    __rmul__ = __mul__

    def invert(self) -> "QSeries":
        if self.is_zero:
            raise LeadingZero("cannot invert the zero series")
        k = next((i for i, x in enumerate(self._nums) if x), None)
        if k is None:
            raise LeadingZero(f"no nonzero coefficient below q^{self.hi}")
        e = self.lo + k
        a = self._nums[k:]
        size = len(a)
        lead = a[0]
        b = [0] * size
        if lead in (1, -1):
            b[0] = lead
            for n in range(1, size):
                acc = 0
                for i in range(1, n + 1):
                    if a[i]:
                        acc += a[i] * b[n - i]
                b[n] = -acc * lead
            return QSeries(-e, self.hi - 2 * e, (x * self.den for x in b), 1)
        # b[n] holds lead^(n+1) times the true coefficient
        b[0] = 1
        for n in range(1, size):
            acc = 0
            power = 1
            for i in range(1, n + 1):
                if a[i]:
                    acc += a[i] * power * b[n - i]
                power *= lead
            b[n] = -acc
        den = lead ** size
        nums = (b[n] * lead ** (size - 1 - n) * self.den for n in range(size))
        return QSeries(-e, self.hi - 2 * e, nums, den)

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return self * other.invert()
        return self.scale(1 / _as_fraction(other))

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        if n == 0:
            if self.is_zero:
                raise RankforgeError("zero series raised to the power 0")
            return QSeries.one(self.hi - self.lo)
        result, base = None, self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # window transforms

    def shift(self, k: int) -> "QSeries":
        if self.is_zero or k == 0:
            return self
        return QSeries(self.lo + k, self.hi + k, self._nums, self.den)

    def truncate(self, n: int) -> "QSeries":
        if self.is_zero:
            return self
        hi = min(self.hi, n)
        lo = min(self.lo, hi)
        return QSeries(lo, hi, self._nums[: hi - lo], self.den)

    def flip(self) -> "QSeries":
        """q -> -q"""
        if self.is_zero:
            return self
        return QSeries(self.lo, self.hi,
                       (-x if (self.lo + i) % 2 else x for i, x in enumerate(self._nums)), self.den)

    def subs(self, m: int) -> "QSeries":
        """q -> q^m"""
        if m < 1:
            raise RankforgeError(f"substitution power must be positive, got {m}")
        if self.is_zero or m == 1:
            return self
        lo, hi = self.lo * m, self.hi * m
        nums = [0] * (hi - lo)
        nums[::m] = self._nums
        return QSeries(lo, hi, nums, self.den)

    def dissect(self, m: int, r: int) -> "QSeries":
        if m < 1 or not 0 <= r < m:
            raise RankforgeError(f"dissection needs m >= 1 and 0 <= r < m, got m={m}, r={r}")
        if self.is_zero:
            return self
        lo = -((r - self.lo) // m)
        hi = -((r - self.hi) // m)
        nums = []
        for t in range(lo, hi):
            e = m * t + r
            nums.append(self._nums[e - self.lo] if e >= self.lo else 0)
        return QSeries(lo, hi, nums, self.den)

    # comparison and output

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        if self.hi != other.hi:
            return False
        if self.is_zero:
            return True
        return all(self.coefficient(e) == other.coefficient(e) for e in range(min(self.lo, other.lo), self.hi))

    __hash__ = None

    def __repr__(self):
        return f"QSeries({self.to_text(limit=8)})"

    def to_text(self, limit: Optional[int] = None) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for e, c in self.items():
            if limit is not None and len(parts) >= limit:
                parts.append("...")
                break
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                power = "q" if e == 1 else f"q^{e}"
                body = power if mag == 1 else f"{mag}*{power}"
            parts.append((sign, body))
        text = ""
        for item in parts:
            if item == "...":
                text += " + ..."
                continue
            sign, body = item
            if not text:
                text = body if sign == "+" else f"-{body}"
            else:
                text += f" {sign} {body}"
        return f"{text or '0'} + O(q^{self.hi})"

    def to_payload(self) -> SeriesPayload:
        if self.is_zero:
            return SeriesPayload(lo=0, hi=None, coeffs=[])
        return SeriesPayload(lo=self.lo, hi=self.hi, coeffs=[fraction_text(c) for c in self.coeffs])

    def to_json(self) -> bytes:
        return msgspec.json.encode(self.to_payload())

    @classmethod
    def from_payload(cls, payload: SeriesPayload) -> "QSeries":
        if payload.hi is None:
            return cls.zero()
        return cls.from_coeffs(payload.coeffs, payload.lo, payload.hi)

    @classmethod
    def from_json(cls, data) -> "QSeries":
        return cls.from_payload(msgspec.json.decode(data, type=SeriesPayload))


def equal_to_order(a: QSeries, b: QSeries, n: int, start: Optional[int] = None) -> SeriesComparison:
    available = min(a.hi, b.hi)
    if available < n:
        raise InsufficientOrder(n, available)
    first = start
    if first is None:
        first = min(a.lo if not a.is_zero else n, b.lo if not b.is_zero else n)
    for e in range(first, n):
        x, y = a.coefficient(e), b.coefficient(e)
        if x != y:
            logger.debug("series differ at q^%d: %s vs %s", e, x, y)
            return SeriesComparison(False, n, Mismatch(e, fraction_text(x), fraction_text(y)))
    return SeriesComparison(True, n)


class ZLaurentPoly:
    """Finitely supported Laurent polynomial in z with integer coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        self._terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def constant(cls, c: int) -> "ZLaurentPoly":
        return cls({0: c})

    def coefficient(self, e: int) -> int:
        return self._terms.get(e, 0)

    def items(self):
        return sorted(self._terms.items())

    def __add__(self, other):
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return ZLaurentPoly(terms)

    def __neg__(self):
        return ZLaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return ZLaurentPoly({e: c * other for e, c in self._terms.items()})
        terms = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                terms[e1 + e2] = terms.get(e1 + e2, 0) + c1 * c2
        return ZLaurentPoly(terms)

    __rmul__ = __mul__

    def at_one(self) -> int:
        return sum(self._terms.values())

    def is_symmetric(self) -> bool:
        return all(self._terms.get(-e, 0) == c for e, c in self._terms.items())

    def __eq__(self, other):
        if isinstance(other, ZLaurentPoly):
            return self._terms == other._terms
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"ZLaurentPoly({dict(self.items())})"


def invert_to_order(factory, n: int, attempts: int = 12) -> QSeries:
    """Invert factory(order) so that the inverse is known below q^n.

    The inverse of a series with valuation v loses 2v known terms, so the factory
    is asked again for the missing precision. Until a nonzero coefficient shows up
    the working order doubles.
    """
    working = max(n, 1)
    known = None
    for _ in range(attempts):
        series = factory(working)
        if series.is_zero:
            raise LeadingZero("cannot invert the zero series")
        if series.valuation() is None:
            logger.debug("no leading coefficient below q^%s, retrying at order %d", series.hi, 2 * working)
            working *= 2
            continue
        inverse = series.invert()
        known = inverse.hi
        if inverse.hi >= n:
            return inverse
        working += n - inverse.hi
    if known is None:
        raise LeadingZero(f"no nonzero coefficient found up to order {working}")
    raise InsufficientOrder(n, known, "inverse")


def multiply_to_order(factories, n: int, attempts: int = 6) -> QSeries:
    """Multiply factory(order) results until the product is known below q^n."""
    working = max(n, 1)
    for _ in range(attempts):
        result = None
        for factory in factories:
            part = factory(working)
            result = part if result is None else result * part
        if result is None:
            return QSeries.one(n)
        if result.hi >= n:
            return result
        logger.debug("product known below q^%s, retrying at order %d", result.hi, working + n - result.hi)
        working += n - result.hi
    raise InsufficientOrder(n, result.hi, "product")
