"""Result tables and their exact CSV / JSON serializations.

CSV carries a header row, '.' decimal separator, 17 significant digits and
LF line endings, so values round-trip through text exactly. JSON is a
single object {"task", "columns", "rows", "provenance"}. Files are written
atomically: a temp file in the target directory is renamed into place, so
an interrupted run never leaves a partial file.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

OUTPUT_FORMATS = ("csv", "json")


@dataclass
class Table:
    columns: tuple
    rows: list
    task: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if value is None:
        return ""
    return format(float(value), ".17g")


def render_csv(table: Table) -> str:
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(_format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(table: Table) -> str:
    payload = {
        "task": table.task,
        "columns": list(table.columns),
        "rows": [list(r) for r in table.rows],
        "provenance": table.provenance,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _atomic_write(text: str, path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gradchain-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_table(table: Table, fmt: str, path: str | None) -> None:
    """Serialize a table; path None writes to standard output."""
    if fmt not in OUTPUT_FORMATS:
        raise ValueError(f"unknown output format {fmt!r}, expected one of {OUTPUT_FORMATS}")
    text = render_csv(table) if fmt == "csv" else render_json(table)
    if path is None:
        import sys
        sys.stdout.write(text)
        return
    _atomic_write(text, path)


def read_json_table(path: str) -> Table:
    with open(path) as fh:
        payload = json.load(fh)
    return Table(columns=tuple(payload["columns"]),
                 rows=[tuple(r) for r in payload["rows"]],
                 task=payload["task"], provenance=payload["provenance"])
