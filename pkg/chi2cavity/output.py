"""Deterministic CSV and JSON writers.

Identical inputs give byte-identical files: floats are written with 17
significant digits, metadata keys are sorted and rows keep caller order.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from collections.abc import Iterable, Iterator, Mapping, Sequence
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from chi2cavity import __version__

TOOL = "chi2cavity"


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool | np.bool_):
        return "true" if value else "false"
    if isinstance(value, int | np.integer):
        return str(int(value))
    if isinstance(value, float | np.floating):
        return format(float(value), ".17g")
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple | np.ndarray):
        return [_jsonable(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, float | np.floating):
        f = float(value)
        # JSON has no inf/nan literal
        return f if math.isfinite(f) else str(f)
    if isinstance(value, Path):
        return str(value)
    return value


def build_metadata(command: str, params: Mapping[str, Any]) -> dict[str, Any]:
    return {"tool": TOOL, "version": __version__, "command": command, "params": dict(params)}


def metadata_lines(metadata: Mapping[str, Any]) -> list[str]:
    lines = []
    for key in sorted(metadata):
        rendered = json.dumps(_jsonable(metadata[key]), sort_keys=True, ensure_ascii=False)
        lines.append(f"# {key}: {rendered}")
    return lines


def write_csv(
    stream: TextIO,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    metadata: Mapping[str, Any] | None = None,
) -> None:
    if metadata:
        for line in metadata_lines(metadata):
            stream.write(line + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])


def write_json(
    stream: TextIO, payload: Mapping[str, Any], metadata: Mapping[str, Any] | None = None
) -> None:
    document = dict(payload)
    if metadata:
        document["metadata"] = dict(metadata)
    stream.write(json.dumps(_jsonable(document), indent=2, sort_keys=True, ensure_ascii=False))
    stream.write("\n")


@contextmanager
def open_output(path: str | Path | None) -> Iterator[TextIO]:
    """``None`` or ``-`` means stdout."""
    if path is None or str(path) == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as handle:
        yield handle
