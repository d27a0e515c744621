"""This module contains code that reads observation streams and writes result files

Observations come as JSONL ({"t": ..., "y": ..., "truth": ...} per line) or as
CSV with a t,y[,truth] header. Every file written starts with '#' comment
lines recording the command, the format version and the full configuration;
readers skip such lines. Column orders are documented in FORMATS.md.
"""

import contextlib
import csv
import json
import logging
import math
import pathlib
import sys
from typing import IO, Dict, Iterable, Iterator, List, Optional, Sequence

import pyrecency
from pyrecency.errors import InputError
from pyrecency.models import ObservationRecord

LOGGER = logging.getLogger(__name__)

FORMAT_VERSION = 1
COMMENT = "#"


def _number(value, what: str, line: int) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{what} must be a number, got {value!r}", line)
    if not math.isfinite(value):
        raise InputError(f"{what} must be finite, got {value!r}", line)
    return float(value)


def _vector(value, what: str, line: int) -> List[float]:
    if isinstance(value, list):
        if not value:
            raise InputError(f"{what} must not be an empty list", line)
        return [_number(item, what, line) for item in value]
    return [_number(value, what, line)]


def _timestamp(value, line: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"t must be an integer, got {value!r}", line)
    return value


def _from_json_line(text: str, line: int) -> ObservationRecord:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as error:
        raise InputError(f"malformed JSON: {error.msg}", line) from None
    if not isinstance(payload, dict):
        raise InputError("each line must hold a JSON object", line)
    for key in ("t", "y"):
        if key not in payload:
            raise InputError(f"record lacks the '{key}' field", line)

    truth = payload.get("truth")
    return ObservationRecord(
        _timestamp(payload["t"], line),
        _vector(payload["y"], "y", line),
        None if truth is None else _vector(truth, "truth", line),
    )


def _csv_records(lines: Iterable[str], path: pathlib.Path) -> Iterator[ObservationRecord]:
    header: Optional[List[str]] = None
    for line, row in enumerate(csv.reader(lines), start=1):
        if not row or row[0].startswith(COMMENT):
            continue
        if header is None:
            header = [column.strip() for column in row]
            if header[:2] != ["t", "y"] or header[2:] not in ([], ["truth"]):
                raise InputError(f"CSV header must be t,y[,truth] in {path}", line)
            continue
        if len(row) != len(header):
            raise InputError(f"expected {len(header)} columns, got {len(row)}", line)
        try:
            values = [float(cell) for cell in row]
            stamp = int(row[0])
        except ValueError:
            raise InputError(f"non-numeric value in {row!r}", line) from None
        truth = _number(values[2], "truth", line) if len(values) == 3 else None
        yield ObservationRecord(stamp, _number(values[1], "y", line), truth)


def _jsonl_records(lines: Iterable[str]) -> Iterator[ObservationRecord]:
    for line, text in enumerate(lines, start=1):
        text = text.strip()
        if not text or text.startswith(COMMENT):
            continue
        yield _from_json_line(text, line)


def ingest(path: pathlib.Path) -> List[ObservationRecord]:
    """Read observation records in order; timestamps must increase strictly

    Files ending in .csv are read as CSV, anything else as JSONL."""
    path = pathlib.Path(path)
    if not path.is_file():
        raise InputError(f"input file {path} does not exist")

    lines: List[str] = []
    with path.open("rb") as handle:
        for line, raw in enumerate(handle.read().splitlines(), start=1):
            try:
                lines.append(raw.decode("utf-8"))
            except UnicodeDecodeError as error:
                raise InputError(f"invalid UTF-8 at byte {error.start}", line) from None

    reader = _csv_records(lines, path) if path.suffix.lower() == ".csv" else _jsonl_records(lines)
    records: List[ObservationRecord] = []
    for record in reader:
        if records and record.t <= records[-1].t:
            raise InputError(
                f"t must increase strictly, got {record.t} after {records[-1].t} "
                f"(record {len(records)})"
            )
        records.append(record)

    LOGGER.debug("Read %s records from %s", len(records), path)
    return records


def comment_header(command: str, fmt: str, config: Dict) -> List[str]:
    """Comment lines that open every output file"""
    return [
        f"{COMMENT} pyrecency {pyrecency.__version__} {command}",
        f"{COMMENT} format: {fmt} v{FORMAT_VERSION}",
        f"{COMMENT} config: {json.dumps(config, sort_keys=True)}",
    ]


def format_cell(value) -> str:
    """Deterministic text for a table cell; floats use their shortest round-trip form"""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


@contextlib.contextmanager
def _opened(output: Optional[pathlib.Path]) -> Iterator[IO[str]]:
    if output is None:
        yield sys.stdout
        return
    with pathlib.Path(output).open("w", encoding="utf-8", newline="") as handle:
        yield handle


def write_table(
    output: Optional[pathlib.Path],
    header: Sequence[str],
    columns: Sequence[str],
    rows: Iterable[Sequence],
) -> None:
    """Write comment header, column names and rows as CSV (stdout when output is None)"""
    with _opened(output) as handle:
        for line in header:
            handle.write(line + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(value) for value in row])


def write_records(
    output: Optional[pathlib.Path], header: Sequence[str], records: Iterable[ObservationRecord]
) -> None:
    """Write observation records as JSONL after the comment header"""
    with _opened(output) as handle:
        for line in header:
            handle.write(line + "\n")
        for record in records:
            handle.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


def write_json(output: Optional[pathlib.Path], header: Sequence[str], payload: Dict) -> None:
    """Write a JSON report; the comment header goes into a '_header' field"""
    document = dict(payload, _header=list(header))
    with _opened(output) as handle:
        handle.write(json.dumps(document, indent=2, sort_keys=True) + "\n")
