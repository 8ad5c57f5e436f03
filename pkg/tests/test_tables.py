import pytest

from ionvq.tables import audit_summary, run_table_suite


@pytest.fixture(scope="module")
def entries():
    return run_table_suite()


def by_id(entries, table, row):
    return next(e for e in entries if e.table == table and e.row == row)


def test_row_count(entries):
    assert len(entries) == 35
    assert sum(1 for e in entries if e.table == "I") == 14
    assert sum(1 for e in entries if e.table == "II") == 4
    assert sum(1 for e in entries if e.table == "III") == 10
    assert sum(1 for e in entries if e.table == "IV") == 7


def test_every_row_checked_under_four_conventions(entries):
    for e in entries:
        assert len(e.statuses) == 4


def test_known_passing_rows(entries):
    for table, row in [("I", "5"), ("I", "7"), ("I", "9"), ("I", "11b"),
                       ("II", "2"), ("II", "3"), ("II", "4"),
                       ("III", "1"), ("III", "2"), ("III", "3"), ("III", "6"), ("III", "7"),
                       ("IV", "2"), ("IV", "4")]:
        e = by_id(entries, table, row)
        assert e.passed, f"{table}.{row} should verify, best={e.best_distance}"


def test_row_13_fails_with_cross_pair_alternative(entries):
    e = by_id(entries, "I", "13")
    assert not e.passed
    alt = e.alternative
    assert alt and alt["verified"] and alt["length"] <= e.sequence_len
    pairs = {g.split()[2] + g.split()[3] for g in alt["gates"]}
    assert pairs == {"03", "12"}, "the X(x)X couplings sit on (0,3) and (1,2)"


def test_every_fail_row_carries_verified_alternative(entries):
    for e in entries:
        if not e.passed:
            assert e.alternative is not None, f"{e.table}.{e.row} missing alternative"
            assert e.alternative["verified"], f"{e.table}.{e.row} alternative failed"
            assert e.alternative["length"] <= e.sequence_len
            assert e.alternative["distance"] <= 1e-9


def test_limited_rows_stay_on_the_graph(entries):
    for e in entries:
        if e.table == "II":
            assert e.legal


def test_repaired_rows_carry_source_notes(entries):
    assert by_id(entries, "III", "4b").note
    assert by_id(entries, "IV", "3").note
    assert by_id(entries, "IV", "7").note
    assert by_id(entries, "IV", "3").passed  # the missing-index completion verifies


def test_statuses_are_distances(entries):
    e = by_id(entries, "I", "5")
    ok = [v for v in e.statuses.values() if v <= 1e-9]
    assert ok, "at least one convention reconstructs row 5"
    assert max(e.statuses.values()) > 1e-3, "other conventions visibly differ"


def test_summary_counts(entries):
    s = audit_summary(entries)
    assert s["rows"] == 35
    assert s["passed"] == sum(1 for e in entries if e.passed)
    assert s["fails_missing_alternative"] == []
