# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import io
import json

import pyarrow as pa
import pyarrow.csv as pa_csv
import pytest

from computable_analysis.errors import ValidationError
from computable_analysis.schema.records import (
    DSEQ_SCHEMA,
    ENUM_SCHEMA,
    SCHEMAS,
    WAVE_SCHEMA,
    RecordWriter,
    schema_to_dict,
)


def _dseq_records():
    return [
        {"n": 2, "d_lo": "0.5", "d_hi": "0.5", "bits": 12},
        {"n": 3, "d_lo": "0.666015625", "d_hi": "0.66650390625", "bits": 12},
    ]


def test_schemas():
    assert set(SCHEMAS) == {"dseq", "wave", "enum"}
    assert DSEQ_SCHEMA.names == ["n", "d_lo", "d_hi", "bits"]
    assert WAVE_SCHEMA.names == ["t", "u_lo", "u_hi", "bits"]
    assert ENUM_SCHEMA.names == ["index", "value"]


def test_schema_to_dict():
    assert schema_to_dict(ENUM_SCHEMA) == {
        "fields": [
            {"name": "index", "type": "int64", "nullable": False},
            {"name": "value", "type": "int64", "nullable": False},
        ]
    }


def test_write_json_lines():
    stream = io.BytesIO()
    with RecordWriter(stream, DSEQ_SCHEMA) as writer:
        for record in _dseq_records():
            writer.write({**record, "extra": "ignored"})
    assert writer.count == 2
    lines = stream.getvalue().decode("utf-8").splitlines()
    assert [json.loads(line) for line in lines] == _dseq_records()


def test_write_csv():
    stream = io.BytesIO()
    with RecordWriter(stream, DSEQ_SCHEMA, "csv") as writer:
        for record in _dseq_records():
            writer.write(record)

    options = pa_csv.ConvertOptions(column_types={"d_lo": pa.string(), "d_hi": pa.string()})
    table = pa_csv.read_csv(io.BytesIO(stream.getvalue()), convert_options=options)
    assert table.column_names == DSEQ_SCHEMA.names
    assert table.to_pylist() == _dseq_records()


def test_csv_of_no_records_is_empty():
    stream = io.BytesIO()
    with RecordWriter(stream, ENUM_SCHEMA, "csv"):
        pass
    assert stream.getvalue() == b""


def test_missing_field():
    writer = RecordWriter(io.BytesIO(), WAVE_SCHEMA)
    with pytest.raises(ValidationError):
        writer.write({"t": "1", "u_lo": "0"})


def test_unknown_format():
    with pytest.raises(ValidationError):
        RecordWriter(io.BytesIO(), ENUM_SCHEMA, "parquet")  # type: ignore[arg-type]
