"""Mock theta functions from their defining q-hypergeometric sums."""

import logging
from fractions import Fraction

import msgspec

from core.errors import RankforgeError, UnknownSeries
from core.products import expand_elementary, finite_pochhammer
from core.series import QSeries

logger = logging.getLogger(__name__)


class MockThetaId(msgspec.Struct, frozen=True):
    """sum_n q^(exponent(n)) * prod over numerator / denominator finite Pochhammer symbols.

    exponent(n) = (a n^2 + b n + c) / 2; each Pochhammer entry (offset, modulus) is
    taken with n + 1 factors.
    """

    name: str
    a: int
    b: int
    c: int
    numerator: tuple[tuple[int, int], ...] = ()
    denominator: tuple[tuple[int, int], ...] = ()

    def exponent(self, n: int) -> int:
        return (self.a * n * n + self.b * n + self.c) // 2


MOCK_THETA = {
    "rho3": MockThetaId("rho3", 4, 4, 0, numerator=((1, 2),), denominator=((3, 6),)),
    "phi10": MockThetaId("phi10", 1, 1, 0, denominator=((1, 2),)),
    "psi10": MockThetaId("psi10", 1, 3, 2, denominator=((1, 2),)),
}

# the identities checked for each mock theta function and each theorem
REPRESENTATIONS = {"rho3": "eq5.2", "phi10": "eq5.3", "psi10": "eq5.4"}
THEOREM_CHECKS = {
    "1.5": ("thm1.5-(1.28)", ["eq5.6", "eq5.6-shifted", "eq5.7", "eq5.9", "law-(5.9)", "eq5.8-same-z", "eq5.10"]),
    "1.6-(1.29)": ("thm1.6-(1.29)", ["eq5.11", "eq5.11-shifted", "eq5.12", "eq5.13", "law-(5.13)",
                                     "eq5.14", "law-(5.14)", "eq5.15", "eq5.16"]),
    "1.6-(1.30)": ("thm1.6-(1.30)", ["eq5.17", "eq5.17-shifted", "eq5.18", "eq5.19", "law-(5.19)",
                                     "eq5.20", "law-(5.20)", "eq5.21", "eq5.22"]),
    "1.6-(1.31)": ("thm1.6-(1.31)", ["eq5.23", "eq5.13", "law-(5.13)", "eq5.14", "law-(5.14)", "eq5.15", "eq5.16"]),
}


def mock_theta_id(name: str) -> MockThetaId:
    try:
        return MOCK_THETA[name]
    except KeyError:
        raise UnknownSeries(f"no mock theta function named {name!r}")


def mock_series(name: str, n: int) -> QSeries:
    spec = mock_theta_id(name)
    total = QSeries(0, max(n, 0), [0] * max(n, 0))
    k = 0
    while spec.exponent(k) < n:
        shift = spec.exponent(k)
        c: dict[int, Fraction] = {}
        for offset, modulus in spec.numerator:
            for e, v in finite_pochhammer(offset, modulus, k + 1).items():
                c[e] = c.get(e, 0) + v
        for offset, modulus in spec.denominator:
            for e, v in finite_pochhammer(offset, modulus, k + 1).items():
                c[e] = c.get(e, 0) - v
        c = {e: v for e, v in c.items() if e < n - shift}
        total = total + expand_elementary(c, n - shift).shift(shift)
        k += 1
    if not total.is_integral():
        raise RankforgeError(f"{name} expanded with non-integral coefficients")
    return total


def hm_representation_check(name: str, n: int, verifier):
    """Compare the defining sum of a mock theta function with its Appell-Lerch form."""
    mock_theta_id(name)
    return verifier.verify(REPRESENTATIONS[name], n)


def theorem_5x_check(which: str, n: int, verifier) -> list:
    """Reports for the theorem itself followed by its intermediate identities."""
    try:
        theorem, steps = THEOREM_CHECKS[which]
    except KeyError:
        raise UnknownSeries(f"no mock theta theorem named {which!r}")
    return [verifier.verify(identity_id, n) for identity_id in [theorem, *steps]]
