"""Atomic CSV/JSON writers with exact float round-tripping."""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path


def fmt_float(x: float) -> str:
    """17 significant digits: parses back to the identical float64."""
    return f"{float(x):.17g}"


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_csv(path, header, rows) -> None:
    """Write rows atomically; floats are formatted with fmt_float."""
    path = Path(path)
    out = []
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append("true" if cell else "false")
            elif isinstance(cell, float):
                cells.append(fmt_float(cell))
            else:
                cells.append("" if cell is None else str(cell))
        out.append(cells)
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(out)
    _atomic_write_text(path, buf.getvalue())


def write_json(path, obj) -> None:
    """Write a JSON document atomically; floats use shortest exact repr."""
    path = Path(path)
    _atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]
