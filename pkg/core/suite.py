"""Concurrent runner for catalog suites."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Optional

import msgspec

from core.catalog import CatalogHandler
from core.errors import RankforgeError
from core.identities import Verifier
from core.oracle import Calibration, calibrate
from core.report import VerificationReport
from core.settings import RunConfig, Settings

logger = logging.getLogger(__name__)


class SuiteHeader(msgspec.Struct):
    suite: str
    convention: str
    odd_sign: str
    forced: bool
    calibration: Calibration
    order: Optional[int]
    parallel: int
    table_max: int

    def to_text(self) -> str:
        how = "forced" if self.forced else f"calibrated to n={self.calibration.max_n}"
        return (f"🔍 suite {self.suite}: rank convention {self.convention}/{self.odd_sign} ({how}), "
                f"rank table to n={self.table_max}, {self.parallel} workers")


class SuiteSummary(msgspec.Struct):
    total: int
    passed: int
    failed: int
    errors: int
    millis: int
    reports: list[VerificationReport]

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.errors == 0

    def to_text(self) -> str:
        mark = "✅" if self.ok else "❌"
        return (f"{mark} {self.passed}/{self.total} passed, {self.failed} failed, "
                f"{self.errors} errors in {self.millis} ms")


def prepare(config: RunConfig, settings: Settings, catalog: CatalogHandler = None):
    """Calibrate the oracle and build the verifier for a run."""
    calibration = calibrate()
    forced = config.chi is not None
    convention = config.chi if forced else calibration.convention
    odd_sign = config.odd_sign if forced else calibration.odd_sign
    verifier = Verifier(catalog or CatalogHandler(settings.assets), settings.table_max, convention, odd_sign)
    header = SuiteHeader(config.suite, convention, odd_sign, forced, calibration,
                         config.order, config.parallel, settings.table_max)
    return verifier, header


def _verify_one(verifier: Verifier, identity_id: str, order: Optional[int]) -> VerificationReport:
    try:
        return verifier.verify(identity_id, order)
    except RankforgeError as e:
        spec = verifier.catalog.identity_converter(identity_id)
        logger.warning("❌ %s raised %s: %s", identity_id, type(e).__name__, e)
        return VerificationReport(id=identity_id, status="error", order=order or spec.order,
                                  suite=spec.suite, tag=spec.tag, message=f"{type(e).__name__}: {e}")


def run_suite(verifier: Verifier, suite: str = "all", order: Optional[int] = None, parallel: int = 4,
              on_report: Optional[Callable[[VerificationReport], None]] = None) -> SuiteSummary:
    """Verify every identity of suite, streaming each report to on_report as it completes."""
    specs = verifier.catalog.suite_identities(suite)
    logger.info("🧮 verifying %d identities with %d workers", len(specs), parallel)
    started = time.perf_counter()
    verifier.warm(specs)

    # reading-dependent identities resolve the tail reading the closed forms use later
    first = [s for s in specs if s.readings]
    rest = [s for s in specs if not s.readings]
    reports = []
    for batch in (first, rest):
        with ThreadPoolExecutor(max_workers=parallel) as executor:
            futures = [executor.submit(_verify_one, verifier, spec.id, order) for spec in batch]
            for i, future in enumerate(as_completed(futures), 1):
                report = future.result()
                reports.append(report)
                logger.debug("✔ %d/%d %s", i, len(futures), report.id)
                if on_report is not None:
                    on_report(report)

    reports.sort(key=lambda r: r.id)
    passed = sum(1 for r in reports if r.ok)
    errors = sum(1 for r in reports if r.status == "error")
    summary = SuiteSummary(len(reports), passed, len(reports) - passed - errors, errors,
                           int((time.perf_counter() - started) * 1000), reports)
    logger.info("%s", summary.to_text())
    return summary
