import csv
import json
import logging
import os
from typing import Dict, Iterable, List, Optional, Sequence, TextIO

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "{:.17g}"


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return FLOAT_FORMAT.format(value)
    return str(value)


def write_csv(rows: Iterable[Dict[str, object]], columns: Sequence[str], stream: TextIO) -> int:
    """Header row plus one line per row, floats at 17 significant digits; returns the row count"""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    count = 0
    for row in rows:
        writer.writerow([format_cell(row.get(c)) for c in columns])
        count += 1
    return count


def write_json(payload: object, stream: TextIO) -> None:
    json.dump(payload, stream, indent=2, sort_keys=True)
    stream.write("\n")


def emit(rows: List[Dict[str, object]], columns: Sequence[str], fmt: str = "csv",
         path: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """Write a table as CSV or JSON to path, or to stream when no path is given"""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")

    def _write(out: TextIO):
        if fmt == "csv":
            write_csv(rows, columns, out)
        else:
            write_json([{c: row.get(c) for c in columns} for row in rows], out)

    if path:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            _write(fh)
        logger.info(f"💾 Wrote {len(rows)} row(s) to {path}")
    else:
        _write(stream)
