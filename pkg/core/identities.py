"""Evaluation of catalog expression trees and verification of identities."""

import logging
import threading
import time
from fractions import Fraction
from functools import partial
from typing import Optional

import msgspec

from core.catalog import CatalogHandler, IdentitySpec
from core.errors import FixtureError, InsufficientTable, RankforgeError, Unsupported
from core.inequalities import negative_coefficients, regrouped_sum
from core.lambert import (READINGS, THEOREM_TERMS, AppellParams, LambertSpec, appell_law, appell_m,
                          lambert_of_theorem, lambert_sum)
from core.mock import mock_series
from core.modular import check_level100
from core.oracle import RankTable, shared_table
from core.products import ProductSpec, expand_product
from core.report import VerificationReport
from core.series import (Mismatch, QSeries, equal_to_order, fraction_text, invert_to_order,
                         multiply_to_order)

logger = logging.getLogger(__name__)

SIX_PRODUCTS = {
    0: (1, "J6^9 J2,4^2 / J2^3 J1,6^6 J3,6"),
    1: (2, "J6^9 J2,4^2 / J2^3 J1,6^5 J3,6^2"),
    2: (4, "J6^9 J2,4^2 / J2^3 J1,6^4 J3,6^3"),
}
TEN_PREFACTOR = "J10^4 J5,10 / J1,2^6"
# (s, t) -> name prefix of the dissection components, tails by d
TEN_FAMILIES = {(0, 4): "A", (1, 3): "B"}
TAILS = {(0, 2, 6, 2): "(1.5)-tail", (0, 4, 10, 4): "(1.7)-tail",
         (1, 3, 10, 1): "(1.14)-tail", (1, 3, 10, 4): "(1.15)-tail"}


def rank_stream(table: RankTable, modulus: int, plus, minus, step: int, offset: int, n: int) -> QSeries:
    """sum_n (sum_{p in plus} N2(p, modulus, step n + offset) - sum_{p in minus} ...) q^n"""
    if n <= 0:
        return QSeries(0, 0)
    last = step * (n - 1) + offset
    if last > table.max_n:
        raise InsufficientTable(f"weight {last} needed but the rank table stops at {table.max_n}")
    coeffs = []
    for i in range(n):
        w = step * i + offset
        value = sum(table.residue(p % modulus, modulus, w) for p in plus)
        value -= sum(table.residue(p % modulus, modulus, w) for p in minus)
        coeffs.append(value)
    return QSeries(0, n, coeffs)


def empirical_R(table: RankTable, s: int, t: int, d: int, modulus: int, n: int) -> QSeries:
    if modulus % 2:
        raise Unsupported(f"rank differences need an even modulus, got {modulus}")
    return rank_stream(table, modulus, [s, s + 1], [t, t + 1], modulus // 2, d, n)


def theta_sum(A: int, B: int, C: int, alt: bool, n: int) -> QSeries:
    """sum over all integers k of (+-1)^k q^((A k^2 + B k)/2 + C)"""
    if A <= 0 or (A + B) % 2:
        raise FixtureError(f"theta sum needs A > 0 and A + B even, got A={A}, B={B}")
    acc: dict[int, int] = {}
    bound = abs(B) / A + 1
    for direction in (1, -1):
        k = 0 if direction == 1 else -1
        while abs(k) <= bound or (A * k * k + B * k) // 2 + C < n:
            e = (A * k * k + B * k) // 2 + C
            if e < n:
                acc[e] = acc.get(e, 0) + (-1 if alt and k % 2 else 1)
            k += direction
    lo = min([0, n] + list(acc))
    nums = [0] * (n - lo)
    for e, c in acc.items():
        nums[e - lo] += c
    return QSeries(lo, n, nums)


def _struct(node: dict, cls):
    fields = {k: node[k] for k in cls.__struct_fields__ if k in node}
    try:
        return msgspec.convert(fields, cls)
    except msgspec.ValidationError as e:
        raise FixtureError(f"bad {node.get('op')} node: {e}")


class Verifier:
    def __init__(self, catalog: CatalogHandler = None, table_max: int = 100,
                 convention: str = "a", odd_sign: str = "plus"):
        self.catalog = catalog or CatalogHandler()
        self.table_max = table_max
        self.convention = convention
        self.odd_sign = odd_sign
        self.tail_reading: Optional[str] = None
        self._memo: dict = {}
        self._lock = threading.Lock()
        self._reading_lock = threading.RLock()
        self._handlers = {
            "prod": self._prod,
            "lambert": self._lambert,
            "appell": self._appell,
            "appell_law": self._appell_law,
            "theta_sum": self._theta_sum,
            "mock": self._mock,
            "flip": self._flip,
            "subs": self._subs,
            "dissect": self._dissect,
            "sum": self._sum,
            "mul": self._mul,
            "inv": self._inv,
            "const": self._const,
            "ref": self._ref,
            "ranks": self._ranks,
            "closed_form": self._closed_form,
            "builtin": self._builtin,
        }

    @property
    def table(self) -> RankTable:
        return shared_table(self.table_max, self.convention, self.odd_sign)

    # expression evaluation

    def evaluate(self, node: dict, n: int) -> QSeries:
        """Value of node, known at least below q^n."""
        key = (msgspec.json.encode(node, order="sorted"), n, self.tail_reading)
        with self._lock:
            cached = self._memo.get(key)
        if cached is not None:
            return cached
        op = node.get("op")
        handler = self._handlers.get(op)
        if handler is None:
            raise FixtureError(f"unknown expression op {op!r}")
        shift = int(node.get("q", 0))
        value = handler(node, n - shift)
        if "c" in node:
            value = value.scale(Fraction(str(node["c"])))
        if shift:
            value = value.shift(shift)
        with self._lock:
            self._memo[key] = value
        return value

    def evaluate_name(self, name: str, n: int) -> QSeries:
        return self.evaluate(self.catalog.definition_converter(name), n)

    def _prod(self, node, n):
        return expand_product(ProductSpec.parse(node["expr"]), n)

    def _lambert(self, node, n):
        return lambert_sum(_struct(node, LambertSpec), n)

    def _appell(self, node, n):
        return appell_m(_struct(node, AppellParams), n)

    def _appell_law(self, node, n):
        return appell_law(tuple(node["x"]), node["k"], tuple(node["z0"]), tuple(node["z1"]), n)

    def _theta_sum(self, node, n):
        return theta_sum(node["A"], node["B"], node["C"], node.get("alt", True), n)

    def _mock(self, node, n):
        return mock_series(node["name"], n)

    def _flip(self, node, n):
        return self.evaluate(node["expr"], n).flip()

    def _subs(self, node, n):
        m = node["m"]
        return self.evaluate(node["expr"], -(-n // m)).subs(m)

    def _dissect(self, node, n):
        m, r = node["m"], node["r"]
        return self.evaluate(node["expr"], m * n + r).dissect(m, r)

    def _sum(self, node, n):
        terms = node.get("terms") or []
        if not terms:
            raise FixtureError("sum node without terms")
        total = None
        for term in terms:
            value = self.evaluate(term, n)
            total = value if total is None else total + value
        return total

    def _mul(self, node, n):
        factors = node.get("factors") or []
        if not factors:
            raise FixtureError("mul node without factors")
        return multiply_to_order([partial(self.evaluate, f) for f in factors], n)

    def _inv(self, node, n):
        return invert_to_order(partial(self.evaluate, node["expr"]), n)

    def _const(self, node, n):
        return QSeries.monomial(Fraction(str(node["value"])), 0, n)

    def _ref(self, node, n):
        return self.evaluate_name(node["name"], n)

    def _ranks(self, node, n):
        return rank_stream(self.table, node["modulus"], node["plus"], node["minus"],
                           node["step"], node["offset"], n)

    def _closed_form(self, node, n):
        return self.closed_form_R(node["s"], node["t"], node["d"], node["modulus"], n, node.get("reading"))

    def _builtin(self, node, n):
        if node.get("name") != "regrouped-sum":
            raise FixtureError(f"unknown builtin series {node.get('name')!r}")
        return regrouped_sum(n)

    # rank differences

    def closed_form_R(self, s: int, t: int, d: int, modulus: int, n: int, reading: Optional[str] = None) -> QSeries:
        if (s, t, modulus) not in ((0, 2, 6), (0, 4, 10), (1, 3, 10)):
            raise Unsupported(f"no closed form for s={s}, t={t} modulo {modulus}")
        if not 0 <= d < modulus // 2:
            raise Unsupported(f"residue {d} outside 0..{modulus // 2 - 1}")
        if modulus == 6:
            coeff, expr = SIX_PRODUCTS[d]
            value = expand_product(ProductSpec.parse(expr), n).scale(coeff)
        else:
            component = f"{TEN_FAMILIES[(s, t)]}{d}"
            value = multiply_to_order([
                lambda m: expand_product(ProductSpec.parse(TEN_PREFACTOR), m),
                partial(self.evaluate_name, component),
            ], n).scale(2)
        tail = TAILS.get((s, t, modulus, d))
        if tail is not None:
            if reading is None and THEOREM_TERMS[tail][4]:
                reading = self.resolve_tail_reading()
            value = value + lambert_of_theorem(tail, reading)(n)
        return value

    def resolve_tail_reading(self) -> str:
        """The tail reading confirmed by the rank table, resolved once per verifier."""
        with self._reading_lock:
            if self.tail_reading is None:
                self.tail_reading = self._resolve_tail_reading()
            return self.tail_reading

    def _resolve_tail_reading(self) -> str:
        for (s, t, modulus, d), tail in sorted(TAILS.items()):
            if not THEOREM_TERMS[tail][4]:
                continue
            n = (self.table_max - d) // (modulus // 2) + 1
            oracle = self.empirical_R(s, t, d, modulus, n)
            passing = [name for name in sorted(READINGS)
                       if equal_to_order(self.closed_form_R(s, t, d, modulus, n, name), oracle, n)]
            if len(passing) == 1:
                logger.info("🔍 tail reading %s confirmed by %s to order %d", passing[0], tail, n)
                return passing[0]
            logger.debug("%s to order %d does not separate the readings: %s", tail, n, passing)
        raise RankforgeError("no tail reading agrees with the rank table")

    def tail_dependent(self, node) -> bool:
        """True when node holds a closed form whose tail needs the resolved reading."""
        if isinstance(node, list):
            return any(self.tail_dependent(item) for item in node)
        if not isinstance(node, dict):
            return False
        if node.get("op") == "closed_form" and "reading" not in node:
            tail = TAILS.get((node.get("s"), node.get("t"), node.get("modulus"), node.get("d")))
            if tail is not None and THEOREM_TERMS[tail][4]:
                return True
        return any(self.tail_dependent(value) for value in node.values())

    def empirical_R(self, s: int, t: int, d: int, modulus: int, n: int) -> QSeries:
        return empirical_R(self.table, s, t, d, modulus, n)

    def oracle_limit(self, node) -> Optional[int]:
        """Largest order the rank table supports for node, None when node needs no table."""
        limits = []

        def walk(item):
            if isinstance(item, dict):
                if item.get("op") == "ranks":
                    limits.append((self.table_max - item["offset"]) // item["step"] + 1)
                for value in item.values():
                    walk(value)
            elif isinstance(item, list):
                for value in item:
                    walk(value)

        walk(node)
        return min(limits) if limits else None

    # verification

    def verify(self, identity_id: str, order: Optional[int] = None) -> VerificationReport:
        spec = self.catalog.identity_converter(identity_id)
        n = spec.order if order is None else order
        if spec.kind == "level100":
            return check_level100(spec.which, n, self.catalog, spec.id)
        limit = self.oracle_limit([spec.lhs, spec.rhs, spec.readings])
        if limit is not None and n > limit:
            logger.info("%s: order %d capped at %d by the rank table", spec.id, n, limit)
            n = limit
        started = time.perf_counter()
        report = self._check(spec, n)
        report.millis = int((time.perf_counter() - started) * 1000)
        logger.info("%s %s %s to order %d", "✅" if report.ok else "❌", spec.id, report.status, n)
        return report

    def _report(self, spec: IdentitySpec, n: int, **fields) -> VerificationReport:
        if "reading" not in fields and self.tail_dependent([spec.lhs, spec.rhs]):
            fields["reading"] = self.tail_reading
        return VerificationReport(id=spec.id, order=n, suite=spec.suite, tag=spec.tag, note=spec.note, **fields)

    def _check(self, spec: IdentitySpec, n: int) -> VerificationReport:
        lhs = self.evaluate(spec.lhs, n)
        if spec.kind == "nonnegativity":
            start = spec.start or 0
            negatives = negative_coefficients(lhs, start, n)
            if not negatives:
                return self._report(spec, n, status="pass")
            e = negatives[0]
            return self._report(spec, n, status="fail",
                                first_mismatch=Mismatch(e, fraction_text(lhs.coefficient(e)), "0/1"))
        if not spec.readings:
            comparison = equal_to_order(lhs, self.evaluate(spec.rhs, n), n, spec.start)
            return self._report(spec, n, status="pass" if comparison.equal else "fail",
                                first_mismatch=comparison.first_mismatch)
        results = {name: equal_to_order(lhs, self.evaluate(node, n), n, spec.start)
                   for name, node in sorted(spec.readings.items())}
        passing = [name for name, comparison in results.items() if comparison.equal]
        if len(passing) == 1:
            with self._reading_lock:
                if self.tail_reading is None:
                    self.tail_reading = passing[0]
                elif self.tail_reading != passing[0]:
                    logger.warning("%s selects the %s reading, the rank table selected %s",
                                   spec.id, passing[0], self.tail_reading)
            return self._report(spec, n, status="ambiguous-resolved", reading=passing[0],
                                message=", ".join(f"{name}: {'pass' if r.equal else 'fail'}" for name, r in results.items()))
        if passing:
            return self._report(spec, n, status="pass", message=f"readings {', '.join(passing)} all pass")
        comparison = equal_to_order(lhs, self.evaluate(spec.rhs, n), n, spec.start)
        return self._report(spec, n, status="fail", first_mismatch=comparison.first_mismatch,
                            message="no reading matches")

    def warm(self, specs) -> None:
        """Build the shared rank table before fanning out, when any spec needs it."""
        if any(self.oracle_limit([s.lhs, s.rhs, s.readings]) is not None for s in specs):
            _ = self.table

