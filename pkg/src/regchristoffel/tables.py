"""Plot-ready result tables: CSV (17 significant digits) or JSON lines."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Sequence


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def format_table(columns: Sequence[str], rows: Sequence[Sequence], fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    if fmt == "jsonl":
        lines = []
        for row in rows:
            rec = {}
            for k, v in zip(columns, row):
                if isinstance(v, float) and not math.isfinite(v):
                    v = _fmt(v)
                rec[k] = v
            lines.append(json.dumps(rec, allow_nan=False))
        return "\n".join(lines) + ("\n" if lines else "")
    raise ValueError(f"unknown table format {fmt!r}")


def write_table(path, columns, rows, fmt: str = "csv") -> None:
    text = format_table(columns, rows, fmt)
    if path in (None, "-"):
        print(text, end="")
    else:
        Path(path).write_text(text)


def _parse(cell: str):
    if cell == "":
        return None
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def read_table(path, fmt: str | None = None) -> list[dict]:
    """Read a table written by :func:`write_table`; floats round-trip exactly."""
    path = Path(path)
    fmt = fmt or ("jsonl" if path.suffix.lower() in (".jsonl", ".json") else "csv")
    text = path.read_text()
    if fmt == "jsonl":
        out = []
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            out.append({k: _parse(v) if isinstance(v, str) else v for k, v in rec.items()})
        return out
    reader = csv.DictReader(io.StringIO(text))
    return [{k: _parse(v) for k, v in row.items()} for row in reader]
