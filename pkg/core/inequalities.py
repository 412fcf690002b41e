"""Support for the rank inequalities: positive regroupings and coefficient sign scans."""

import logging

from core.errors import RankforgeError
from core.products import ProductSpec, expand_product
from core.series import QSeries

logger = logging.getLogger(__name__)

# (c, d, c2, d2, d3) for the two residue families of the regrouped sum
REGROUPED_FAMILIES = ((1, 2, 12, 2, 8), (2, 4, 15, 4, 10))


def regrouped_sum(n: int) -> QSeries:
    """Sum over k >= 0 and both families of

        q^(12k^2+12k+c) / (1 - q^(12k+d)) * (1 + q^3 + ... + q^(3(4k+2)))
      + q^(12k^2+36k+c2) (1 + q^3) / ((1 - q^(12k+d2)) (1 - q^(12k+d3)))

    Every summand expands with nonnegative coefficients.
    """
    n = max(n, 0)
    coeffs = [0] * n
    k = 0
    while 12 * k * k + 12 * k + 1 < n:
        for c, d, c2, d2, d3 in REGROUPED_FAMILIES:
            base = 12 * k * k + 12 * k + c
            step = 12 * k + d
            for e in range(base, n, step):
                for m in range(4 * k + 3):
                    if e + 3 * m >= n:
                        break
                    coeffs[e + 3 * m] += 1
            base = 12 * k * k + 36 * k + c2
            for e in range(base, n, 12 * k + d2):
                for f in range(e, n, 12 * k + d3):
                    coeffs[f] += 1
                    if f + 3 < n:
                        coeffs[f + 3] += 1
        k += 1
    return QSeries(0, n, coeffs)


def negative_coefficients(series: QSeries, start: int, stop: int) -> list:
    """Exponents in [start, stop) whose coefficient is negative."""
    return [e for e in range(start, stop) if series.coefficient(e) < 0]


def liaw_product(p: int, r: int, n: int) -> QSeries:
    """(q^p;q^p) / ((q^r;q^p) (q^(p-r);q^p))"""
    if not 0 < r < p:
        raise RankforgeError(f"need 0 < r < p, got p={p}, r={r}")
    return expand_product(ProductSpec.parse(f"P{p},{p} / P{r},{p} P{p - r},{p}"), n)


def liaw_check(p: int, r: int, n: int) -> list:
    negatives = negative_coefficients(liaw_product(p, r, n), 0, n)
    if negatives:
        logger.warning("❌ b_{%d,%d} negative at %s", p, r, negatives[:5])
    return negatives
