#!/usr/bin/env python3
"""CSV and JSON writers for command output."""

from __future__ import annotations
import contextlib
import csv
import enum
import json
import math
import sys
from pathlib import Path
from typing import Any, Iterable, Iterator, Optional, Sequence, TextIO

import numpy as np

SCHEMA_VERSION = 1


class Format(enum.Enum):
    CSV = "csv"
    JSON = "json"


@contextlib.contextmanager
def open_output(path: Optional[Path]) -> Iterator[TextIO]:
    """Yields stdout when no path is given."""
    if path is None:
        yield sys.stdout
        return
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        yield f


def csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".10g")
    return str(value)


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Header row then one line per row, LF line endings."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([csv_cell(x) for x in row])


def jsonable(value: Any) -> Any:
    """Converts numpy values, enums and non-finite floats into plain JSON values."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(stream: TextIO, payload: dict) -> None:
    """Writes {"schema_version": 1, ...payload}. Floats use the shortest repr that round-trips."""
    document = {"schema_version": SCHEMA_VERSION, **jsonable(payload)}
    json.dump(document, stream, indent=2, allow_nan=False)
    stream.write("\n")
