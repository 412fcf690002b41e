"""Infinite products, theta functions and generalized eta functions as QSeries.

Product expressions are written as whitespace separated tokens with an optional
lone "/" between numerator and denominator:

    J{m}        (q^m;q^m)_inf
    J{a},{m}    j(q^a;q^m)
    Jb{a},{m}   j(-q^a;q^m)
    P{a},{m}    (q^a;q^m)_inf
    N{a},{m}    (-q^a;q^m)_inf
    E{d},{g}    generalized eta function (eta quotients only)

Any token may carry ^e with e an integer or p/q, possibly negative.
"""

import logging
import re
from fractions import Fraction

import msgspec

from core.errors import FixtureError, LeadingZero, NonIntegralExponent, NonIntegralPrefix
from core.series import QSeries

logger = logging.getLogger(__name__)

TOKEN = re.compile(r"^(Jb|J|P|N|E)(\d+)(?:,(\d+))?(?:\^(-?\d+(?:/\d+)?))?$")


class Factor(msgspec.Struct, frozen=True, array_like=True):
    """(sign*q^offset; q^modulus)_inf ^ exponent"""

    sign: int
    offset: int
    modulus: int
    exponent: str = "1"

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise FixtureError(f"factor sign must be +1 or -1, got {self.sign}")
        if self.modulus < 1 or self.offset < 0:
            raise FixtureError(f"bad factor ({self.sign}q^{self.offset}; q^{self.modulus})")

    @property
    def power(self) -> Fraction:
        return Fraction(self.exponent)


class ProductSpec(msgspec.Struct, frozen=True):
    factors: tuple[Factor, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "ProductSpec":
        factors = []
        for token, sign in _split_tokens(text):
            kind, first, second, power = _match_token(token)
            if kind == "E":
                raise FixtureError(f"eta token {token!r} outside an eta quotient")
            factors.extend(_token_factors(kind, first, second, power * sign, token))
        return cls(tuple(factors))

    def __mul__(self, other: "ProductSpec") -> "ProductSpec":
        return ProductSpec(self.factors + other.factors)

    def raised(self, e) -> "ProductSpec":
        e = Fraction(e)
        return ProductSpec(tuple(
            Factor(f.sign, f.offset, f.modulus, str(f.power * e)) for f in self.factors
        ))

    def inverse(self) -> "ProductSpec":
        return self.raised(-1)


def _split_tokens(text: str):
    tokens = text.split()
    if tokens.count("/") > 1:
        raise FixtureError(f"more than one '/' in product {text!r}")
    sign = 1
    for token in tokens:
        if token == "/":
            sign = -1
            continue
        yield token, sign


def _match_token(token: str):
    match = TOKEN.match(token)
    if not match:
        raise FixtureError(f"cannot read product token {token!r}")
    kind, first, second, power = match.groups()
    try:
        power = Fraction(power) if power else Fraction(1)
    except (ValueError, ZeroDivisionError):
        raise FixtureError(f"bad exponent in token {token!r}")
    return kind, int(first), (int(second) if second is not None else None), power


def _token_factors(kind, first, second, power, token):
    e = str(power)
    if kind == "J" and second is None:
        if first < 1:
            raise FixtureError(f"modulus must be positive in {token!r}")
        return [Factor(1, first, first, e)]
    if second is None or second < 1:
        raise FixtureError(f"token {token!r} needs an offset and a positive modulus")
    a, m = first, second
    if kind == "J":
        return theta_factors(1, a, m, e)
    if kind == "Jb":
        return theta_factors(-1, a, m, e)
    if kind == "P":
        return [Factor(1, a, m, e)]
    return [Factor(-1, a, m, e)]


def theta_factors(sign: int, a: int, m: int, exponent: str = "1") -> list:
    """Factors of j(sign*q^a; q^m) with a reduced mod m."""
    a %= m
    return [Factor(sign, a, m, exponent), Factor(sign, m - a, m, exponent), Factor(1, m, m, exponent)]


def elementary_exponents(spec: ProductSpec, n: int):
    """Rewrite spec as 2^t * prod (1 - q^k)^c_k for k < n.

    Returns (c, t, vanishes) where vanishes marks a (1;q^m) factor with positive exponent.
    """
    c: dict[int, Fraction] = {}
    two = Fraction(0)
    vanishes = False
    for f in spec.factors:
        e = f.power
        if e == 0:
            continue
        start = f.offset
        if start == 0:
            if f.sign == 1:
                if e < 0:
                    raise LeadingZero(f"(1; q^{f.modulus}) raised to {e}")
                vanishes = True
            else:
                two += e
            start = f.modulus
        for k in range(start, n, f.modulus):
            if f.sign == 1:
                c[k] = c.get(k, 0) + e
            else:
                # (1 + q^k) = (1 - q^2k) / (1 - q^k)
                c[k] = c.get(k, 0) - e
                if 2 * k < n:
                    c[2 * k] = c.get(2 * k, 0) + e
    return c, two, vanishes


def expand_elementary(c: dict, n: int, two: Fraction = Fraction(0)) -> QSeries:
    if n <= 0:
        return QSeries(n, n)
    b = [0] * n
    for k, ck in c.items():
        ck = Fraction(ck)
        if ck == 0:
            continue
        if ck.denominator != 1:
            raise NonIntegralExponent(f"elementary factor (1 - q^{k}) has exponent {ck}")
        ck = int(ck)
        for i in range(k, n, k):
            b[i] -= k * ck
    if Fraction(two).denominator != 1:
        raise NonIntegralExponent(f"constant factor 2 has exponent {two}")
    support = [i for i in range(1, n) if b[i]]
    f = [0] * n
    f[0] = 1
    for j in range(1, n):
        acc = 0
        for i in support:
            if i > j:
                break
            acc += b[i] * f[j - i]
        f[j] = acc // j
    two = int(two)
    if two >= 0:
        return QSeries(0, n, (x << two for x in f) if two else f)
    return QSeries(0, n, f, 1 << -two)


def expand_product(spec: ProductSpec, n: int) -> QSeries:
    c, two, vanishes = elementary_exponents(spec, n)
    if vanishes:
        return QSeries.zero()
    return expand_elementary(c, n, two)


def parse_and_expand(text: str, n: int) -> QSeries:
    return expand_product(ProductSpec.parse(text), n)


def finite_pochhammer(a: int, m: int, count: int) -> dict:
    """Elementary exponents of (q^a; q^m)_count."""
    c: dict[int, Fraction] = {}
    for i in range(count):
        k = a + m * i
        c[k] = c.get(k, 0) + 1
    return c


def j_series(sign: int, a: int, m: int, n: int) -> QSeries:
    return expand_product(ProductSpec(tuple(theta_factors(sign, a, m))), n)


def theta_monomial(sign: int, e: int, k: int, n: int) -> QSeries:
    """j(sign*q^e; q^k) for any integer e, via quasi-periodicity."""
    t, a = divmod(e, k)
    shift = -a * t - k * t * (t - 1) // 2
    base = j_series(sign, a, k, n - shift)
    if base.is_zero:
        return base
    flip = -1 if (t % 2 and sign == 1) else 1
    return base.shift(shift).scale(flip).truncate(n)


# generalized eta functions


class EtaTerm(msgspec.Struct, frozen=True, array_like=True):
    delta: int
    g: int
    r: str = "1"

    def __post_init__(self):
        if self.delta < 1 or not 0 <= self.g <= self.delta:
            raise FixtureError(f"eta term ({self.delta}, {self.g}) needs 0 <= g <= delta")
        r = Fraction(self.r)
        if r.denominator != 1 and ((2 * r).denominator != 1 or (self.g % self.delta and 2 * self.g != self.delta)):
            raise FixtureError(f"eta term ({self.delta}, {self.g}) cannot carry the exponent {r}")

    @property
    def power(self) -> Fraction:
        return Fraction(self.r)


class EtaQuotientSpec(msgspec.Struct, frozen=True):
    level: int
    terms: tuple[EtaTerm, ...] = ()

    def __post_init__(self):
        for term in self.terms:
            if self.level % term.delta:
                raise FixtureError(f"{term.delta} does not divide the level {self.level}")

    @classmethod
    def parse(cls, text: str, level: int) -> "EtaQuotientSpec":
        terms = []
        for token, sign in _split_tokens(text):
            kind, first, second, power = _match_token(token)
            if kind != "E" or second is None:
                raise FixtureError(f"expected an eta token E<delta>,<g>, got {token!r}")
            terms.append(EtaTerm(first, second, str(power * sign)))
        return cls(level, tuple(terms))

    def merged(self, other: "EtaQuotientSpec") -> "EtaQuotientSpec":
        return EtaQuotientSpec(self.level, self.terms + other.terms)


def bernoulli2(t: Fraction) -> Fraction:
    """{t}^2 - {t} + 1/6"""
    frac = t - (t.numerator // t.denominator)
    return frac * frac - frac + Fraction(1, 6)


def eta_prefix(delta: int, g: int) -> Fraction:
    return bernoulli2(Fraction(g, delta)) * delta / 2


def eta_factors(delta: int, g: int, exponent: Fraction = Fraction(1)) -> list:
    g %= delta
    if g == 0:
        return [Factor(1, delta, delta, str(2 * exponent))]
    e = str(exponent)
    return [Factor(1, g, delta, e), Factor(1, delta - g, delta, e)]


def eta_series(delta: int, g: int, n: int):
    """Return (prefix, body) with eta_{delta,g} = q^prefix * body."""
    return eta_prefix(delta, g), expand_product(ProductSpec(tuple(eta_factors(delta, g))), n)


def quotient_prefix(spec: EtaQuotientSpec) -> Fraction:
    return sum((eta_prefix(t.delta, t.g) * t.power for t in spec.terms), Fraction(0))


def quotient_product(spec: EtaQuotientSpec) -> ProductSpec:
    factors = []
    for t in spec.terms:
        factors.extend(eta_factors(t.delta, t.g, t.power))
    return ProductSpec(tuple(factors))


def expand_eta_quotient(spec: EtaQuotientSpec, n: int) -> QSeries:
    prefix = quotient_prefix(spec)
    if prefix.denominator != 1:
        raise NonIntegralPrefix(f"eta quotient has q-power {prefix}")
    p = int(prefix)
    return expand_product(quotient_product(spec), n - p).shift(p)
