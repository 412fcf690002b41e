"""Bilateral Lambert-type sums and Appell-Lerch sums m(x, q, z) with monomial arguments."""

import logging
from typing import Callable, Optional

import msgspec

from core.errors import FixtureError, PoleAtTerm, UnknownTerm, ZeroTheta
from core.products import ProductSpec, expand_product, parse_and_expand, theta_monomial
from core.series import QSeries, invert_to_order, multiply_to_order

logger = logging.getLogger(__name__)


class LambertSpec(msgspec.Struct, frozen=True):
    """sum_n (+-1)^n q^(A n^2 + B n + C) / (1 + s q^(D n + E))"""

    A: int
    B: int
    C: int
    s: int
    D: int
    E: int
    alt: bool = True
    bilateral: bool = True

    def __post_init__(self):
        if self.A <= 0:
            raise FixtureError(f"Lambert sum needs A > 0, got {self.A}")
        if self.s not in (1, -1):
            raise FixtureError(f"Lambert denominator sign must be +1 or -1, got {self.s}")

    def mirrored(self) -> "LambertSpec":
        """The same sum reindexed by n -> -n."""
        return LambertSpec(self.A, -self.B, self.C, self.s, -self.D, self.E, self.alt, self.bilateral)


class AppellParams(msgspec.Struct, frozen=True):
    """m(x, q^k, z) with x = sx*q^jx and z = sz*q^jz."""

    x: tuple[int, int]
    k: int
    z: tuple[int, int]

    def __post_init__(self):
        if self.k < 1 or self.x[0] not in (1, -1) or self.z[0] not in (1, -1):
            raise FixtureError(f"bad Appell-Lerch arguments {self.x}, {self.k}, {self.z}")


def reciprocal_terms(sign: int, d: int, limit: int):
    """Expand 1/(1 + sign*q^d) in positive powers, yielding (exponent, 2*coefficient) below limit.

    For d < 0 the term is rewritten as sign*q^-d / (1 + sign*q^-d) first.
    """
    if d > 0:
        c = 2
        for e in range(0, limit, d):
            yield e, c
            c = -sign * c
    elif d == 0:
        if sign == -1:
            raise PoleAtTerm("denominator 1 - q^0 vanishes")
        if limit > 0:
            yield 0, 1
    else:
        k = -d
        c = 2 * sign
        for e in range(k, limit, k):
            yield e, c
            c = -sign * c


def _indices(bound: float, lowest: Callable[[int], int], n: int, bilateral: bool = True):
    """Yield the summation indices whose least exponent can fall below n.

    Beyond |i| > bound the least exponent grows with |i|.
    """
    yield 0
    directions = (1, -1) if bilateral else (1,)
    for step in directions:
        i = step
        while abs(i) <= bound or lowest(i) < n:
            yield i
            i += step


def _collect(acc: dict, n: int, den: int) -> QSeries:
    lo = min([0, n] + [e for e in acc if e < n])
    nums = [0] * (n - lo)
    for e, c in acc.items():
        if e < n:
            nums[e - lo] += c
    return QSeries(lo, n, nums, den)


def lambert_sum(spec: LambertSpec, n: int) -> QSeries:
    A, B, C, D, E = spec.A, spec.B, spec.C, spec.D, spec.E
    bound = (abs(B) + abs(D)) / (2 * A)

    def lowest(i):
        return A * i * i + B * i + C + max(0, -(D * i + E))

    acc: dict[int, int] = {}
    for i in _indices(bound, lowest, n, spec.bilateral):
        base = A * i * i + B * i + C
        sign = -1 if spec.alt and i % 2 else 1
        try:
            terms = list(reciprocal_terms(spec.s, D * i + E, n - base))
        except PoleAtTerm:
            raise PoleAtTerm(f"summand n={i} of {spec} has a vanishing denominator")
        for e, c in terms:
            acc[base + e] = acc.get(base + e, 0) + sign * c
    return _collect(acc, n, 2)


def _appell_sum(p: AppellParams, n: int) -> QSeries:
    (sx, jx), k, (sz, jz) = p.x, p.k, p.z
    sigma = sx * sz

    def lowest(r):
        return k * r * (r - 1) // 2 + jz * r + max(0, -(k * (r - 1) + jx + jz))

    acc: dict[int, int] = {}
    for r in _indices(abs(jz) // k + 2, lowest, n):
        base = k * r * (r - 1) // 2 + jz * r
        sign = -1 if (r % 2 and sz == 1) else 1
        for e, c in reciprocal_terms(-sigma, k * (r - 1) + jx + jz, n - base):
            acc[base + e] = acc.get(base + e, 0) + sign * c
    return _collect(acc, n, 2)


def _theta_inverse(sign: int, e: int, k: int):
    if sign == 1 and e % k == 0:
        raise ZeroTheta(f"j(q^{e}; q^{k}) vanishes")
    return lambda n: invert_to_order(lambda m: theta_monomial(sign, e, k, m), n)


def appell_m(p: AppellParams, n: int) -> QSeries:
    (sx, jx), k, (sz, jz) = p.x, p.k, p.z
    if sx * sz == 1 and (jx + jz) % k == 0:
        raise PoleAtTerm(f"x*z is an integral power of q^{k} in m({p.x}, q^{k}, {p.z})")
    inverse = _theta_inverse(sz, jz, k)
    return multiply_to_order([lambda m: _appell_sum(p, m), inverse], n)


def appell_law(x: tuple, k: int, z0: tuple, z1: tuple, n: int) -> QSeries:
    """Closed form of m(x, q^k, z1) - m(x, q^k, z0)."""
    (sx, jx), (s0, j0), (s1, j1) = x, z0, z1
    if s0 * s1 == 1 and (j1 - j0) % k == 0:
        # j(z1/z0) vanishes
        return QSeries.zero()
    order = n - j0
    factors = [
        lambda m: expand_product(ProductSpec.parse(f"J{k}^3"), m),
        lambda m: theta_monomial(s1 * s0, j1 - j0, k, m),
        lambda m: theta_monomial(sx * s0 * s1, jx + j0 + j1, k, m),
        _theta_inverse(s0, j0, k),
        _theta_inverse(s1, j1, k),
        _theta_inverse(sx * s0, jx + j0, k),
        _theta_inverse(sx * s1, jx + j1, k),
    ]
    return multiply_to_order(factors, order).shift(j0).scale(s0)


# the Lambert tails of the rank-difference theorems: (coefficient, q power, theta, sum, reading dependent)
THEOREM_TERMS = {
    "(1.5)-tail": (2, 2, "J3,6", LambertSpec(3, 6, 0, 1, 6, 4), False),
    "(1.7)-tail": (1, 4, "J5,10", LambertSpec(5, 10, 0, 1, 10, 8), True),
    "(1.14)-tail": (-1, 4, "J5,10", LambertSpec(5, 10, 0, 1, 10, 6), True),
    "(1.15)-tail": (-1, 4, "J5,10", LambertSpec(5, 10, 0, 1, 10, 8), True),
}

# the theorem statements print the mod 10 tails with q^4, the assembled series carry 2q^4
READINGS = {"printed": 1, "assembled": 2}


def lambert_of_theorem(term_id: str, reading: Optional[str] = None) -> Callable[[int], QSeries]:
    try:
        coeff, power, theta, spec, ambiguous = THEOREM_TERMS[term_id]
    except KeyError:
        raise UnknownTerm(f"no Lambert term named {term_id!r}")
    if reading is None and ambiguous:
        raise UnknownTerm(f"{term_id} depends on the tail reading, pass one of {sorted(READINGS)}")
    if reading is not None and reading not in READINGS:
        raise UnknownTerm(f"unknown reading {reading!r} for {term_id}")
    if ambiguous:
        coeff *= READINGS[reading]

    def build(n: int) -> QSeries:
        inverse = lambda m: invert_to_order(lambda mm: parse_and_expand(theta, mm), m)
        body = multiply_to_order([lambda m: lambert_sum(spec, m), inverse], n - power)
        return body.shift(power).scale(coeff)

    return build
