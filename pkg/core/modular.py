"""Robins' criterion and the level 100 eta-quotient identities."""

import logging
import time
from fractions import Fraction

import msgspec

from core.catalog import CatalogHandler, EtaIdentity
from core.errors import NonIntegralPrefix
from core.products import (EtaQuotientSpec, bernoulli2, expand_eta_quotient, expand_product,
                           quotient_prefix, quotient_product)
from core.report import VerificationReport
from core.series import QSeries, equal_to_order, fraction_text, multiply_to_order

logger = logging.getLogger(__name__)


class RobinsResult(msgspec.Struct):
    passed: bool
    first_sum: str
    second_sum: str


def _even_integer(x: Fraction) -> bool:
    return x.denominator == 1 and x.numerator % 2 == 0


def robins_check(spec: EtaQuotientSpec) -> RobinsResult:
    first = Fraction(0)
    second = Fraction(0)
    for t in spec.terms:
        first += t.delta * bernoulli2(Fraction(t.g, t.delta)) * t.power
        second += Fraction(spec.level, t.delta) * Fraction(1, 6) * t.power
    return RobinsResult(_even_integer(first) and _even_integer(second), fraction_text(first), fraction_text(second))


def _sum(parts) -> QSeries:
    total = None
    for part in parts:
        total = part if total is None else total + part
    return total


def level100_sides(identity: EtaIdentity, n: int):
    """Expand both sides below q^n.

    The prefactor's q-power is merged into every right hand term before the
    integrality check, its product part multiplies the whole right hand sum.
    """
    prefactor = EtaQuotientSpec.parse(identity.prefactor, identity.level)
    extra = quotient_prefix(prefactor)
    lhs = _sum(
        expand_eta_quotient(EtaQuotientSpec.parse(t.expr, identity.level), n).scale(Fraction(t.c))
        for t in identity.lhs
    )
    right = [(Fraction(t.c), EtaQuotientSpec.parse(t.expr, identity.level)) for t in identity.rhs]

    def right_sum(m):
        parts = []
        for c, spec in right:
            p = quotient_prefix(spec) + extra
            if p.denominator != 1:
                raise NonIntegralPrefix(f"right hand term {spec} has q-power {p}")
            p = int(p)
            parts.append(expand_product(quotient_product(spec), m - p).shift(p).scale(c))
        return _sum(parts)

    rhs = multiply_to_order([right_sum, lambda m: expand_product(quotient_product(prefactor), m)], n)
    return lhs, rhs


def robins_failures(identity: EtaIdentity) -> list:
    prefactor = EtaQuotientSpec.parse(identity.prefactor, identity.level)
    failures = []
    for side, terms, merge in (("lhs", identity.lhs, False), ("rhs", identity.rhs, True)):
        for t in terms:
            spec = EtaQuotientSpec.parse(t.expr, identity.level)
            result = robins_check(spec.merged(prefactor) if merge else spec)
            if not result.passed:
                failures.append(f"{side} {t.c} {t.expr or '1'}: {result.first_sum}, {result.second_sum}")
    return failures


def check_level100(which: str, n: int, catalog: CatalogHandler = None, identity_id: str = None) -> VerificationReport:
    catalog = catalog or CatalogHandler()
    identity = catalog.eta_converter(which)
    started = time.perf_counter()
    logger.info("🧮 expanding %s to order %d", which, n)
    lhs, rhs = level100_sides(identity, n)
    comparison = equal_to_order(lhs, rhs, n)
    failures = robins_failures(identity)
    passed = comparison.equal and not failures
    logger.info("%s %s to order %d", "✅" if passed else "❌", which, n)
    return VerificationReport(
        id=identity_id or which,
        status="pass" if passed else "fail",
        order=n,
        first_mismatch=comparison.first_mismatch,
        millis=int((time.perf_counter() - started) * 1000),
        suite="modular",
        tag=identity.tag,
        note=identity.note,
        message="; ".join(f"Robins check fails for {f}" for f in failures) or None,
    )


def verify_level100(which: str, margin: int = 60, catalog: CatalogHandler = None) -> VerificationReport:
    """Check every coefficient q^1..q^(bound+margin) of the identity."""
    catalog = catalog or CatalogHandler()
    bound = catalog.eta_converter(which).bound
    return check_level100(which, bound + max(margin, 0) + 1, catalog)
