import pytest

from core.catalog import CatalogHandler
from core.modular import check_level100, level100_sides, robins_check, robins_failures, verify_level100
from core.products import EtaQuotientSpec
from core.series import equal_to_order


def test_robins_criterion():
    # Delta(tau) = eta(tau)^24 = eta_{1,0}^12
    result = robins_check(EtaQuotientSpec.parse("E1,0^12", 1))
    assert result.passed
    assert (result.first_sum, result.second_sum) == ("2/1", "2/1")
    assert not robins_check(EtaQuotientSpec.parse("E1,0", 1)).passed


def test_robins_criterion_on_a_level_100_term():
    spec = EtaQuotientSpec.parse("E100,5 E100,20 E100,30^2 E100,45 / E100,10 E100,15 E100,35 E100,40 E100,50", 100)
    result = robins_check(spec)
    assert result.passed
    assert (result.first_sum, result.second_sum) == ("6/1", "0/1")


@pytest.mark.parametrize("which", ["lemma3.5", "lemma3.6"])
def test_every_term_is_a_modular_function(which):
    assert robins_failures(CatalogHandler().eta_converter(which)) == []


@pytest.mark.parametrize("which", ["lemma3.5", "lemma3.6"])
def test_level100_identities_at_low_order(which):
    report = check_level100(which, 120)
    assert report.status == "pass", report.to_text()
    assert report.suite == "modular"


def test_sides_are_integral_series():
    lhs, rhs = level100_sides(CatalogHandler().eta_converter("lemma3.5"), 60)
    assert lhs.hi >= 60 and rhs.hi >= 60
    assert equal_to_order(lhs, rhs, 60)


@pytest.mark.slow
@pytest.mark.parametrize("which, order", [("lemma3.5", 661), ("lemma3.6", 701)])
def test_level100_identities_past_the_sturm_bound(which, order):
    report = verify_level100(which)
    assert report.ok
    assert report.order == order
