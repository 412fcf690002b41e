import pytest

from core.errors import OutOfRange, RankforgeError
from core.oracle import (Overpartition, Part, RankTable, calibrate, enumerate_overpartitions, gen_fn_M2, m2_rank,
                         overpartition_count, rank_counts, rank_counts_fast, shared_table)

OVERPARTITIONS = [1, 2, 4, 8, 14, 24, 40, 64, 100, 154, 232, 344, 504, 728, 1040, 1472,
                  2062, 2864, 3948, 5400, 7336, 9904, 13288, 17728, 23528, 31066]


def test_overpartition_counts():
    assert [overpartition_count(n) for n in range(26)] == OVERPARTITIONS
    assert overpartition_count(100) == 53287424374
    assert overpartition_count(-1) == 0


def test_enumeration_lists_each_overpartition_once():
    ops = enumerate_overpartitions(3)
    assert len(ops) == 8
    assert len(set(ops)) == 8
    assert all(op.weight == 3 for op in ops)
    assert str(Overpartition((Part(2, True), Part(1)))) == "2\u0305+1"
    with pytest.raises(OutOfRange):
        enumerate_overpartitions(-1)


def test_ranks_of_small_overpartitions():
    assert m2_rank(Overpartition()) == 0
    assert m2_rank(Overpartition((Part(1),))) == 0
    assert m2_rank(Overpartition((Part(1, True),))) == 0
    # ceil(2/2) - 1 = 0 for a single part 2, with or without its overline
    assert m2_rank(Overpartition((Part(2),))) == 0
    # (1 + 1 + 1): ceil(1/2) - 3 + 3 - 1
    assert m2_rank(Overpartition((Part(1),) * 3)) == 0
    assert m2_rank(Overpartition((Part(1),) * 3), odd_sign="minus") == -6


def test_generating_function_rows():
    rows = gen_fn_M2(16)
    for n, row in enumerate(rows):
        assert row.at_one() == OVERPARTITIONS[n]
        assert row.is_symmetric()


@pytest.mark.parametrize("convention", ["a", "b"])
@pytest.mark.parametrize("odd_sign", ["plus", "minus"])
def test_fast_table_matches_enumeration(convention, odd_sign):
    slow = rank_counts(14, convention, odd_sign, workers=2)
    fast = rank_counts_fast(14, convention, odd_sign)
    assert slow.rows == fast.rows


@pytest.mark.slow
@pytest.mark.parametrize("convention", ["a", "b"])
@pytest.mark.parametrize("odd_sign", ["plus", "minus"])
def test_fast_table_matches_enumeration_to_25(convention, odd_sign):
    slow = rank_counts(25, convention, odd_sign)
    fast = rank_counts_fast(25, convention, odd_sign)
    assert slow.rows == fast.rows


def test_calibration_picks_a_single_convention():
    calibration = calibrate()
    assert (calibration.convention, calibration.odd_sign) == ("a", "plus")
    assert sum(t.passed for t in calibration.trials) == 1
    assert len(calibration.trials) == 4


def test_table_laws_and_residues():
    table = rank_counts_fast(40)
    table.check_laws()
    for n in (0, 7, 40):
        assert sum(table.residue(s, 6, n) for s in range(6)) == table.total(n)
        for s in range(1, 10):
            assert table.residue(s, 10, n) == table.residue(10 - s, 10, n)
    assert table.residue(0, 6, 0) == 1
    with pytest.raises(OutOfRange):
        table.count(0, 41)
    with pytest.raises(OutOfRange):
        table.residue(6, 6, 3)


@pytest.mark.slow
def test_table_laws_to_100():
    table = rank_counts_fast(100)
    table.check_laws()
    assert table.total(100) == overpartition_count(100)


def test_table_export_shapes():
    table = rank_counts_fast(3)
    rows = list(table.residue_rows(6))
    assert len(rows) == 4 * 6
    assert rows[0] == (0, 0, 1)
    exported = table.as_dict()
    assert exported["max_n"] == 3
    assert exported["rows"][0] == {"0": 1}


def test_broken_table_fails_its_laws():
    with pytest.raises(RankforgeError):
        RankTable([{0: 1}, {0: 1}]).check_laws()


def test_unknown_flags_are_rejected():
    with pytest.raises(RankforgeError):
        rank_counts_fast(3, convention="c")
    with pytest.raises(RankforgeError):
        rank_counts(3, odd_sign="zero")


def test_shared_table_is_built_once():
    first = shared_table(30)
    assert shared_table(20) is first
