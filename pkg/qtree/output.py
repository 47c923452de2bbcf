"""Row writers for the command line: CSV, JSON and a rounded text table."""

from __future__ import annotations

import contextlib
import csv
import enum
import json
import logging
import math
import sys
from typing import Any, Iterable, Iterator, List, Optional, Sequence, TextIO

from ._constants import CSV_DIGITS, TABLE_DIGITS
from .errors import InvalidParameterError

logger = logging.getLogger(__name__)


def format_edges(edges: Iterable[Sequence[int]]) -> str:
    """``u-v`` pairs joined by ``;`` so the field never needs quoting."""
    return ";".join(f"{u}-{v}" for u, v in edges)


def _plain(value: Any) -> Any:
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (tuple, list)) and value and isinstance(value[0], tuple):
        return format_edges(value)
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        return value.item()
    return value


def csv_field(value: Any) -> str:
    value = _plain(value)
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.{CSV_DIGITS}g}"
    if isinstance(value, (tuple, list)):
        return ";".join(csv_field(v) for v in value)
    return str(value)


def table_field(value: Any) -> str:
    value = _plain(value)
    if isinstance(value, float):
        return f"{value:.{TABLE_DIGITS}f}"
    if isinstance(value, (tuple, list)):
        return ";".join(table_field(v) for v in value)
    return str(value)


def _json_value(value: Any) -> Any:
    value = _plain(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (tuple, list)):
        return [_json_value(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    return value


@contextlib.contextmanager
def open_output(out: Optional[str]) -> Iterator[TextIO]:
    """``out`` opened for writing with LF newlines, or standard output for None / ``-``."""
    if out is None or out == "-":
        yield sys.stdout
        return
    with open(out, "w", encoding="utf-8", newline="") as handle:
        yield handle
    logger.info("wrote %s", out)


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([csv_field(v) for v in row])
        count += 1
    return count


def write_table(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    body: List[List[str]] = [[table_field(v) for v in row] for row in rows]
    widths = [len(h) for h in header]
    for row in body:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    stream.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
    for row in body:
        stream.write("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() + "\n")
    return len(body)


def write_json(stream: TextIO, payload: Any) -> None:
    json.dump(_json_value(payload), stream, indent=2)
    stream.write("\n")


def write_rows(
    header: Sequence[str], rows: Iterable[Sequence[Any]], fmt: str = "csv", out: Optional[str] = None
) -> int:
    """Write ``rows`` under ``header`` as csv, json (a list of objects) or table."""
    rows = list(rows)
    with open_output(out) as stream:
        if fmt == "csv":
            return write_csv(stream, header, rows)
        if fmt == "table":
            return write_table(stream, header, rows)
        if fmt == "json":
            write_json(stream, [dict(zip(header, row)) for row in rows])
            return len(rows)
    raise InvalidParameterError(f"unknown output format {fmt!r}")


def read_csv(path: str) -> List[dict]:
    """Rows of a CSV written by :func:`write_csv`, values left as strings."""
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))
