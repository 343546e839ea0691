import io

import pytest
from hypothesis import given, strategies as st

from formicode import data
from formicode.data import (
    CsvFormatError,
    emit_csv,
    ingest_csv,
    load_table,
    read_xy_csv,
    table_to_dataset,
    trials_to_dataset,
)
from formicode.simulation import TrialRecord

GOLDEN = {
    1: "08a14608288eac09d009dd6d19d0beedf7864553ceede78936279ae2bbdc27e0",
    2: "94dc87b1337daea20fca873b697a74c061cfa6fd44220658129d0154ecdb20af",
    3: "4e10c3c0ced310c3f749f514aba08aa9f40e012b091408bc2e0a0e603f28375c",
    4: "b392076b1078c29992e5c9977e25c8d252c7242b85903cddfc66923821f2c131",
    5: "0377dc5fe5e77b5d3929e74b5707d9e539ec31c72ecf310864b518b6d10128bf",
    6: "0bc4b4beac3a290c2458de90773c44ccbae5e165eaa56a6e63153ad051029efa",
}


@pytest.mark.parametrize("tid", range(1, 7))
def test_golden_checksums(tid):
    assert load_table(tid).checksum() == GOLDEN[tid]


def test_load_examples():
    assert load_table(2).rows[0][1:] == ("LL", 72, 18)
    assert load_table(3).rows[3][1:] == (40, 300, "II")
    assert load_table(6).rows[0] == (150, (10, 20), 0.95, 0.80)


def test_table_shapes():
    assert [len(load_table(t).rows) for t in range(1, 7)] == [8, 15, 15, 5, 17, 3]
    assert load_table(1).non_replicable
    assert not any(load_table(t).non_replicable for t in range(2, 7))


def test_spot_values():
    t4 = {row[0]: row[3:] for row in load_table(4).rows}
    assert t4["Vert.1"] == (0.93, 7.3, -28.9)
    assert t4["Vert.2"] == (0.99, 5.88, -17.11)
    assert t4["Circle"] == (0.98, 8.62, -24.4)
    assert load_table(2).column("mean_s")[12:] == [180, 220, 200]
    assert load_table(1).column("mean_s") == [345.7, 36.3, 508.0, 37.3, 118.7, 16.6, 565.9, 16.3]


def test_unknown_table():
    with pytest.raises(KeyError):
        load_table(7)


def test_tampered_table_detected(monkeypatch):
    original = data._TABLES[3]
    bad_rows = (original.rows[0][:2] + (43, "I"),) + original.rows[1:]
    monkeypatch.setitem(data._TABLES, 3, data.PaperTable(3, original.caption, original.columns, bad_rows, original.provenance))
    with pytest.raises(RuntimeError):
        load_table(3)


def test_table_row_arity_checked():
    with pytest.raises(ValueError):
        data.PaperTable(9, "x", (data.Column("a", "integer"),), ((1, 2),), "test")


def test_table5_flattening():
    ds = table_to_dataset(load_table(5), {"x": "distance", "t": "seconds"})
    assert len(ds) == 44
    assert set(ds.xs) == {0, 1, 2, 3, 4, 5, 6, 7, 10}
    first = table_to_dataset(load_table(5), {"x": "distance", "t": "seconds"}, rows=[0])
    assert [(o.x, o.t) for o in first.records] == [(6, 35), (6, 30)]


def test_table3_dataset():
    ds = table_to_dataset(load_table(3), {"x": "branch", "t": "seconds", "label": "scout"})
    assert len(ds) == 15
    assert ds.records[3].label == "II"


def test_table_to_dataset_errors():
    with pytest.raises(ValueError, match="empty"):
        table_to_dataset(load_table(3), {"x": "branch", "t": "seconds"}, rows=[])
    with pytest.raises(ValueError, match="non-numeric"):
        table_to_dataset(load_table(3), {"x": "branch", "t": "scout"})
    with pytest.raises(KeyError):
        table_to_dataset(load_table(3), {"x": "branch", "t": "nope"})
    with pytest.raises(ValueError):
        table_to_dataset(load_table(3), {"x": "branch"})


def test_export_table_csv_quotes_multi_values():
    buf = io.StringIO()
    data.export_table_csv(load_table(5), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "branch,distance,seconds"
    assert lines[1] == '26,6,"35,30"'


# -- trial CSV ----------------------------------------------------------------------

finite = st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False)
record = st.builds(
    TrialRecord,
    trial_id=st.integers(1, 10**6),
    stage=st.integers(1, 5),
    goal=st.integers(0, 64),
    code_length=finite,
    contact_duration=st.floats(min_value=1, max_value=1e4),
    decoded_goal=st.integers(0, 64),
    success=st.booleans(),
    search_time=finite,
)


@given(st.lists(record, max_size=30, unique_by=lambda r: r.trial_id))
def test_csv_round_trip(records):
    buf = io.StringIO()
    emit_csv(records, buf)
    buf.seek(0)
    assert ingest_csv(buf) == records


def test_csv_header_order():
    buf = io.StringIO()
    emit_csv([], buf)
    assert buf.getvalue().strip() == ",".join(data.TRIAL_COLUMNS)


GOOD = ("trial_id,stage,goal,code_length,contact_duration_s,decoded_goal,success,search_time_s\n"
        "1,1,10,10.0,44.1,10,true,60.0\n"
        "2,1,12,12.0,80.5,11,false,75.0\n")


def test_crlf_and_lf_accepted():
    lf = ingest_csv(io.StringIO(GOOD))
    crlf = ingest_csv(io.StringIO(GOOD.replace("\n", "\r\n")))
    assert lf == crlf
    assert len(lf) == 2 and lf[1].success is False


def test_bad_number_names_line():
    bad = GOOD.replace("80.5", "abc")
    with pytest.raises(CsvFormatError, match="line 3") as exc:
        ingest_csv(io.StringIO(bad))
    assert exc.value.line == 3
    assert "contact_duration_s" in str(exc.value)


def test_missing_column():
    with pytest.raises(CsvFormatError, match="missing columns"):
        ingest_csv(io.StringIO(GOOD.replace("search_time_s", "search")))


def test_duplicate_trial_id():
    with pytest.raises(CsvFormatError, match="duplicate"):
        ingest_csv(io.StringIO(GOOD.replace("\n2,", "\n1,")))


def test_bad_bool_and_arity():
    with pytest.raises(CsvFormatError, match="line 2"):
        ingest_csv(io.StringIO(GOOD.replace("true", "yes")))
    with pytest.raises(CsvFormatError, match="fields"):
        ingest_csv(io.StringIO(GOOD.replace(",60.0\n", "\n")))


def test_path_input(tmp_path):
    p = tmp_path / "t.csv"
    p.write_bytes(GOOD.encode())
    assert len(ingest_csv(p)) == 2
    assert len(ingest_csv(str(p))) == 2


def test_trials_to_dataset():
    ds = trials_to_dataset(ingest_csv(io.StringIO(GOOD)), "goal", "contact_duration_s")
    assert ds.xs == [10, 12] and ds.ts == [44.1, 80.5]
    with pytest.raises(KeyError):
        trials_to_dataset(ingest_csv(io.StringIO(GOOD)), "depth", "contact_duration_s")


def test_read_xy_csv():
    ds = read_xy_csv(io.StringIO("depth,seconds\r\n2,150\r\n3,210\r\n"), "depth", "seconds")
    assert ds.xs == [2, 3]
    with pytest.raises(CsvFormatError, match="line 3"):
        read_xy_csv(io.StringIO("depth,seconds\n2,150\n3,x\n"), "depth", "seconds")
    with pytest.raises(CsvFormatError, match="missing column"):
        read_xy_csv(io.StringIO("depth,seconds\n2,150\n"), "bits", "seconds")


def test_dataset_rejects_negative_time():
    with pytest.raises(ValueError):
        data.Dataset([data.Observation(1, -1)])
