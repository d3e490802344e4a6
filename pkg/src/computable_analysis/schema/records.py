# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import json
import logging
from typing import IO, Any, Dict, Optional

import pyarrow as pa
import pyarrow.csv as pa_csv
from typing_extensions import Literal

from computable_analysis.errors import ValidationError

logger = logging.getLogger(__name__)

OutputFormat = Literal["json", "csv"]

# Certified d_n enclosures, one row per n.
DSEQ_SCHEMA = pa.schema(
    [
        pa.field("n", pa.int64(), nullable=False),
        pa.field("d_lo", pa.string(), nullable=False),
        pa.field("d_hi", pa.string(), nullable=False),
        pa.field("bits", pa.int32(), nullable=False),
    ]
)

# Certified u(t, 0) enclosures over a sweep of times.
WAVE_SCHEMA = pa.schema(
    [
        pa.field("t", pa.string(), nullable=False),
        pa.field("u_lo", pa.string(), nullable=False),
        pa.field("u_hi", pa.string(), nullable=False),
        pa.field("bits", pa.int32(), nullable=False),
    ]
)

# Enumeration logs: the i-th distinct value emitted.
ENUM_SCHEMA = pa.schema(
    [
        pa.field("index", pa.int64(), nullable=False),
        pa.field("value", pa.int64(), nullable=False),
    ]
)

SCHEMAS: Dict[str, pa.Schema] = {
    "dseq": DSEQ_SCHEMA,
    "wave": WAVE_SCHEMA,
    "enum": ENUM_SCHEMA,
}


def schema_to_dict(schema: pa.Schema) -> dict:
    """
    Convert a record schema to a JSON-friendly description, for `--help` and documentation.

    :param schema: The schema to describe.
    :return: {"fields": [{"name", "type", "nullable"}, ...]}
    """
    return {"fields": [{"name": f.name, "type": str(f.type), "nullable": f.nullable} for f in schema]}


class RecordWriter:
    """Streams records of a fixed schema as CSV (via pyarrow) or JSON lines, flushing after every record."""

    def __init__(self, stream: IO[bytes], schema: pa.Schema, output_format: OutputFormat = "json"):
        """
        Create a new RecordWriter.

        :param stream: a binary stream to write to.
        :param schema: the record schema.
        :param output_format: "json" for one JSON object per line or "csv" for a CSV table with a header.
        :raises ValidationError: for an unknown format.
        """
        if output_format not in ("json", "csv"):
            err = f"Unknown output format '{output_format}'. Expected 'json' or 'csv'."
            raise ValidationError(err)
        self.stream = stream
        self.schema = schema
        self.output_format = output_format
        self.count = 0
        self._writer: Optional[pa_csv.CSVWriter] = None
        self._sink: Optional[pa.PythonFile] = None

    def __enter__(self) -> "RecordWriter":
        return self

    def __exit__(self, *exc: Any):
        self.close()

    def write(self, record: Dict[str, Any]):
        """
        Write one record and flush it.

        :param record: a mapping with a value for every schema field.
        :raises ValidationError: if a field is missing.
        """
        missing = [name for name in self.schema.names if name not in record]
        if missing:
            err = f"Record {record} is missing fields {missing}."
            raise ValidationError(err)

        if self.output_format == "csv":
            if self._writer is None:
                self._sink = pa.PythonFile(self.stream, mode="w")
                self._writer = pa_csv.CSVWriter(self._sink, self.schema)
            batch = pa.RecordBatch.from_pylist([{name: record[name] for name in self.schema.names}], schema=self.schema)
            self._writer.write_batch(batch)
            self._sink.flush()  # type: ignore[union-attr]
        else:
            line = json.dumps({name: record[name] for name in self.schema.names}) + "\n"
            self.stream.write(line.encode("utf-8"))
        self.stream.flush()
        self.count += 1

    def close(self):
        if self._writer is not None:
            self._writer.close()
            self._writer = None
        self.stream.flush()
        logger.debug("Wrote %d records.", self.count)
