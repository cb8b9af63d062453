import pytest

from ticketlab import Table, UsageError, emit_csv, read_records_csv, record_table
from ticketlab.results import RECORD_COLUMNS, render_csv

from test_metrics import make_record, row


class TestEmitCsv:
    def test_empty_table_is_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_csv(Table(("a", "b"), []), path)
        assert path.read_text() == "a,b\n"

    def test_floats_round_trip_exactly(self, tmp_path):
        values = [0.5, 0.1 + 0.2, 1 / 3, 1e-300, 123456.789]
        path = tmp_path / "f.csv"
        emit_csv(Table(("v",), [(v,) for v in values]), path)
        lines = path.read_text().splitlines()[1:]
        assert [float(line) for line in lines] == values

    def test_identical_tables_byte_identical(self, tmp_path):
        table = Table(("x", "y"), [(1, 0.25), (2, 2 / 7)])
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(table, a)
        emit_csv(table, b)
        assert a.read_bytes() == b.read_bytes()

    def test_lf_newlines(self):
        text = render_csv(Table(("x",), [(1,), (2,)]))
        assert "\r" not in text
        assert text.endswith("\n")

    def test_row_width_validated(self):
        with pytest.raises(UsageError):
            Table(("a", "b"), [(1,)])


class TestRecordRoundTrip:
    def test_schema(self):
        table = record_table([make_record([row(0, 0.0, 0.9)])])
        assert table.columns == RECORD_COLUMNS

    def test_records_survive_csv_round_trip(self, tmp_path):
        records = [
            make_record([row(0, 0.0, 0.9), row(1, 0.2, 0.88)], seed=0),
            make_record([row(0, 0.0, 0.91), row(1, 0.2, 0.87)], seed=1, method="random"),
        ]
        path = tmp_path / "records.csv"
        emit_csv(record_table(records), path)
        back = read_records_csv(path)
        assert len(back) == 2
        for orig, loaded in zip(records, back):
            assert loaded.experiment_id == orig.experiment_id
            assert loaded.method == orig.method
            assert loaded.mode == orig.mode
            assert loaded.seed == orig.seed
            assert loaded.arch is None
            assert loaded.rows == orig.rows

    def test_bad_header_rejected(self, tmp_path):
        from ticketlab import DataFormatError

        path = tmp_path / "bad.csv"
        path.write_text("nope,nope\n1,2\n")
        with pytest.raises(DataFormatError):
            read_records_csv(path)
