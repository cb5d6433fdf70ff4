"""Result tables and their delimited serializations.

Every run reduces to a flat list of rows with one fixed schema. Files are
written tempfile-then-rename so a crash never leaves a partial file, and
float fields use ``repr`` (shortest round-trip form), which makes the
bytes a pure function of the numbers: identical specs give identical
files regardless of worker count or wall time.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
from dataclasses import dataclass

#: Column order of the delimited output. ``value_db`` is 10*log10 of
#: ``value_linear`` for every row, including spectral-efficiency rows.
COLUMNS = ("experiment", "sweep_var", "sweep_value", "terminal", "method",
           "value_linear", "value_db", "std_err", "seed")


@dataclass(frozen=True)
class ResultRow:
    """One scalar result of one method at one sweep coordinate."""

    experiment: str
    sweep_var: str
    sweep_value: float
    terminal: str          # terminal index, "avg", "sum", or "pooled"
    method: str
    value_linear: float
    value_db: float
    std_err: float | None  # standard error of value_linear, MC rows only
    seed: int


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows) -> str:
    """Render rows as CSV text with a fixed header and '\\n' line ends."""
    lines = [",".join(COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(getattr(row, col)) for col in COLUMNS))
    return "\n".join(lines) + "\n"


def rows_to_json(rows, spec_echo: dict | None = None) -> str:
    """Render rows as a self-describing JSON document."""
    doc = {
        "columns": list(COLUMNS),
        "spec": spec_echo or {},
        "rows": [{col: getattr(row, col) for col in COLUMNS} for row in rows],
    }
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _atomic_write(text: str, path: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle = tempfile.NamedTemporaryFile("w", dir=directory, delete=False,
                                         encoding="utf-8", newline="")
    try:
        with handle:
            handle.write(text)
        # The temp file is born 0600; give the result normal open() modes.
        mask = os.umask(0)
        os.umask(mask)
        os.chmod(handle.name, 0o666 & ~mask)
        os.replace(handle.name, path)
    except BaseException:
        os.unlink(handle.name)
        raise


def emit_results(rows, path: str | None, out_format: str = "csv",
                 spec_echo: dict | None = None) -> str:
    """Serialize rows to ``path`` (or stdout when ``path`` is None).

    Returns the serialized text either way.
    """
    if out_format == "csv":
        text = rows_to_csv(rows)
    elif out_format == "json":
        text = rows_to_json(rows, spec_echo)
    else:
        raise ValueError(f"unknown format {out_format!r}")
    if path is None:
        sys.stdout.write(text)
    else:
        _atomic_write(text, path)
    return text


def _parse_value(col: str, text):
    if col in ("sweep_value", "value_linear", "value_db", "std_err"):
        if text in ("", None):
            return None
        return float(text)
    if col == "seed":
        return int(text)
    return text


def load_results(path: str) -> list[ResultRow]:
    """Read rows back from a CSV or JSON results file."""
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        records = doc["rows"]
    else:
        lines = [line for line in text.split("\n") if line]
        header = tuple(lines[0].split(","))
        if header != COLUMNS:
            raise ValueError(f"unexpected header in {path}")
        records = [dict(zip(COLUMNS, line.split(","))) for line in lines[1:]]
    return [ResultRow(**{col: _parse_value(col, rec[col]) for col in COLUMNS})
            for rec in records]
