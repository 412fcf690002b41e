import random
from fractions import Fraction

import pytest

from core.errors import FixtureError, PoleAtTerm, UnknownTerm, ZeroTheta
from core.lambert import (AppellParams, LambertSpec, appell_law, appell_m, lambert_of_theorem, lambert_sum,
                          reciprocal_terms)
from core.series import equal_to_order


def test_reciprocal_expansions():
    assert list(reciprocal_terms(1, 2, 7)) == [(0, 2), (2, -2), (4, 2), (6, -2)]
    assert list(reciprocal_terms(-1, 3, 7)) == [(0, 2), (3, 2), (6, 2)]
    assert list(reciprocal_terms(1, 0, 5)) == [(0, 1)]
    # 1/(1 + q^-3) = q^3 - q^6 + q^9 - ...
    assert list(reciprocal_terms(1, -3, 10)) == [(3, 2), (6, -2), (9, 2)]
    with pytest.raises(PoleAtTerm):
        list(reciprocal_terms(-1, 0, 5))


def test_lambert_spec_validation():
    with pytest.raises(FixtureError):
        LambertSpec(0, 1, 0, 1, 1, 1)
    with pytest.raises(FixtureError):
        LambertSpec(1, 1, 0, 2, 1, 1)


def test_bilateral_sum_is_invariant_under_reindexing():
    spec = LambertSpec(3, 1, 0, 1, 6, 4)
    assert equal_to_order(lambert_sum(spec, 40), lambert_sum(spec.mirrored(), 40), 40)


def test_single_term_lambert_sum():
    # only n = 0 contributes below q^3 when A = 3, B = 0, C = 0: 1/(1 - q^2)
    spec = LambertSpec(3, 0, 0, -1, 0, 2, bilateral=False)
    assert lambert_sum(spec, 3).coeffs == (1, 0, 1)


def test_vanishing_denominator_is_reported():
    with pytest.raises(PoleAtTerm):
        lambert_sum(LambertSpec(1, 0, 0, -1, 1, 0), 10)


def test_appell_law_matches_direct_difference():
    x, k, z0, z1 = (1, 1), 3, (-1, 0), (-1, 1)
    direct = appell_m(AppellParams(x, k, z1), 30) - appell_m(AppellParams(x, k, z0), 30)
    assert equal_to_order(direct, appell_law(x, k, z0, z1, 30), 30)


def test_appell_law_vanishes_for_equivalent_z():
    assert appell_law((1, 1), 3, (-1, 0), (-1, 3), 20).is_zero


def test_appell_poles_and_zero_thetas():
    with pytest.raises(PoleAtTerm):
        appell_m(AppellParams((1, 1), 2, (1, 1)), 10)
    with pytest.raises(ZeroTheta):
        appell_m(AppellParams((1, 1), 2, (1, 2)), 10)
    with pytest.raises(FixtureError):
        AppellParams((2, 1), 2, (1, 1))


def test_theorem_tails():
    printed = lambert_of_theorem("(1.7)-tail", "printed")(25)
    assembled = lambert_of_theorem("(1.7)-tail", "assembled")(25)
    assert assembled == printed.scale(2)
    assert lambert_of_theorem("(1.5)-tail", "printed")(25) == lambert_of_theorem("(1.5)-tail")(25)
    with pytest.raises(UnknownTerm):
        lambert_of_theorem("(9.9)-tail")
    with pytest.raises(UnknownTerm):
        lambert_of_theorem("(1.7)-tail", "halved")
    with pytest.raises(UnknownTerm):
        lambert_of_theorem("(1.14)-tail")


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5])
def test_theorem_tails_at_small_orders(n):
    tail = lambert_of_theorem("(1.7)-tail", "assembled")(n)
    assert tail.hi >= n
    assert all(tail.coefficient(e) == 0 for e in range(min(tail.lo, 0), min(n, 4)))


def test_lambert_sum_with_a_half_term():
    # sum (-1)^n q^(n^2 + 2n) / (1 + q^(6n))
    spec = LambertSpec(1, 2, 0, 1, 6, 0)
    assert lambert_sum(spec, 10).coeffs == (Fraction(1, 2), 0, 0, -1, 0, -1, 0, 0, 1, 1)


def direct_lambert(spec, n, reach=20):
    """Coefficients below q^n, summand by summand."""
    coeffs = {}
    indices = range(-reach, reach + 1) if spec.bilateral else range(reach + 1)
    for i in indices:
        base = spec.A * i * i + spec.B * i + spec.C
        sign = -1 if spec.alt and i % 2 else 1
        d = spec.D * i + spec.E
        limit = n - base
        if limit <= 0:
            continue
        if d > 0:
            expansion = [(j * d, (-spec.s) ** j) for j in range(limit)]
        elif d == 0:
            expansion = [(0, Fraction(1, 2))]
        else:
            expansion = [(j * -d, spec.s * (-spec.s) ** (j - 1)) for j in range(1, limit + 1)]
        for e, c in expansion:
            if base + e < n:
                coeffs[base + e] = coeffs.get(base + e, 0) + sign * c
    return coeffs


@pytest.mark.slow
def test_random_lambert_specs_match_direct_expansion():
    rng = random.Random(4242)
    for _ in range(1000):
        D, E = rng.randint(-6, 6), rng.randint(-6, 6)
        pole_free = E != 0 if D == 0 else E % D != 0
        spec = LambertSpec(rng.randint(1, 3), rng.randint(-6, 6), rng.randint(0, 3),
                           rng.choice((1, -1)) if pole_free else 1, D, E,
                           rng.random() < 0.5, rng.random() < 0.8)
        n = rng.randint(1, 30)
        series = lambert_sum(spec, n)
        expected = direct_lambert(spec, n)
        exponents = set(expected) | {e for e, _ in series.items()}
        assert all(series.coefficient(e) == expected.get(e, 0) for e in exponents), spec
        assert (series.scale(2)).is_integral()
