import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocoonlab.dataio import (
    FLUX_COLUMNS,
    GSWEEP_COLUMNS,
    flux_dataset_rows,
    format_number,
    gsweep_dataset_rows,
    parse_dataset_json,
    parse_rows_csv,
    serialize_dataset_json,
    serialize_rows_csv,
)
from cocoonlab.sweep import flux_sweep, g_sweep


class TestFormatNumber:
    def test_integral_floats_lose_point(self):
        assert format_number(-4.0) == "-4"
        assert format_number(0.0) == "0"

    def test_ints(self):
        assert format_number(12) == "12"

    def test_shortest_round_trip(self):
        assert format_number(0.1) == "0.1"
        assert float(format_number(1 / 3)) == 1 / 3

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            format_number(float("nan"))

    @given(st.floats(allow_nan=False, allow_infinity=False))
    @settings(max_examples=200)
    def test_round_trip_property(self, x):
        assert float(format_number(x)) == x


class TestCsv:
    def test_schema_example(self):
        data = serialize_rows_csv(FLUX_COLUMNS, [(0, 0, 0, -4.0, 0.0)])
        assert data == b"q,p,eigen_index,re,im\n0,0,0,-4,0\n"

    def test_round_trip_small(self):
        rows = [(0, 0, 0, -4.0, 0.0), (0, 0, 1, -1.5, 0.25)]
        cols, parsed = parse_rows_csv(serialize_rows_csv(FLUX_COLUMNS, rows))
        assert cols == FLUX_COLUMNS
        assert parsed == rows

    def test_round_trip_thousand_row_dataset(self):
        ds = flux_sweep(10, 0.2)
        rows = flux_dataset_rows(ds)
        assert len(rows) == 1000
        data = serialize_rows_csv(FLUX_COLUMNS, rows)
        cols, parsed = parse_rows_csv(data)
        assert parsed == rows
        assert serialize_rows_csv(cols, parsed) == data

    def test_gsweep_schema(self):
        ds = g_sweep(4, 0, [0.0, 0.5], ps=(0,))
        data = serialize_rows_csv(GSWEEP_COLUMNS, gsweep_dataset_rows(ds))
        assert data.startswith(b"g,q,p,eigen_index,re,im\n")

    def test_lf_endings_only(self):
        data = serialize_rows_csv(FLUX_COLUMNS, [(0, 0, 0, 1.0, 0.0)])
        assert b"\r" not in data

    def test_rejects_ragged_rows(self):
        with pytest.raises(ValueError):
            serialize_rows_csv(FLUX_COLUMNS, [(1, 2)])


class TestJson:
    def test_round_trip_with_config(self):
        rows = [(0, 0, 0, -4.0, 0.0)]
        cfg = {"L": 3, "g": 0.0, "subcommand": "spectrum"}
        data = serialize_dataset_json(FLUX_COLUMNS, rows, cfg)
        cols, parsed, config = parse_dataset_json(data)
        assert cols == FLUX_COLUMNS
        assert parsed == rows
        assert config == cfg

    def test_exact_value_preserved(self):
        data = serialize_dataset_json(FLUX_COLUMNS, [(0, 0, 0, -4.0, 0.0)], {})
        doc = json.loads(data)
        assert doc["rows"][0][3] == -4

    def test_timestamp_off_by_default(self):
        data = serialize_dataset_json(FLUX_COLUMNS, [], {})
        assert b"timestamp" not in data

    def test_deterministic_bytes(self):
        rows = [(0, 1, 2, 3.5, -0.25)]
        a = serialize_dataset_json(FLUX_COLUMNS, rows, {"b": 1, "a": 2})
        b = serialize_dataset_json(FLUX_COLUMNS, rows, {"a": 2, "b": 1})
        assert a == b

    def test_rejects_unknown_schema(self):
        with pytest.raises(ValueError):
            parse_dataset_json(b'{"schema_version": 99, "columns": [], "rows": []}')

    @given(st.lists(st.tuples(st.integers(0, 40), st.integers(0, 40),
                              st.integers(0, 40),
                              st.floats(-10, 10, allow_nan=False),
                              st.floats(-10, 10, allow_nan=False)),
                    max_size=30))
    @settings(max_examples=50)
    def test_round_trip_property(self, rows):
        data = serialize_dataset_json(FLUX_COLUMNS, rows, {"seed": 1})
        cols, parsed, _ = parse_dataset_json(data)
        assert parsed == rows
        csv_data = serialize_rows_csv(FLUX_COLUMNS, rows)
        _, csv_parsed = parse_rows_csv(csv_data)
        assert csv_parsed == rows
