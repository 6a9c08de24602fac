"""Row emission in csv, json or aligned plain text.

Output is UTF-8 with LF line endings and does not depend on the locale.
Optional ``meta`` (tool version, parameters, seed) is written as ``# key=value``
lines before the CSV header, as a ``meta`` object in JSON and as leading
comment lines in plain text.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from collections.abc import Iterable, Sequence
from fractions import Fraction

FORMATS = ("csv", "json", "plain")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _json_value(value):
    if isinstance(value, Fraction):
        return str(value)
    return value


def render(rows: Iterable[dict], columns: Sequence[str], fmt: str = "csv", meta: dict | None = None) -> str:
    rows = list(rows)
    if fmt not in FORMATS:
        raise ValueError(f"format {fmt!r} not in {FORMATS}")
    if fmt == "json":
        doc = {
            "meta": {k: _json_value(v) for k, v in (meta or {}).items()},
            "columns": list(columns),
            "rows": [{c: _json_value(r.get(c)) for c in columns} for r in rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    out = io.StringIO()
    for key, value in (meta or {}).items():
        out.write(f"# {key}={_cell(value)}\n")
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_cell(r.get(c)) for c in columns])
        return out.getvalue()
    table = [list(columns)] + [[_cell(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(columns))]
    for line in table:
        out.write("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() + "\n")
    return out.getvalue()


def emit_report(rows, columns, fmt: str = "csv", target=None, meta: dict | None = None) -> None:
    """Write rows to ``target`` (a path, a text stream, or stdout when None)."""
    text = render(rows, columns, fmt, meta)
    if target is None or target == "-":
        sys.stdout.write(text)
    elif hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
