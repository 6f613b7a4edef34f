"""Fixed-schema result tables: delimited text with full-precision floats,
or an aligned plain-text summary for reading."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

FORMATS = ("csv", "txt")
INT_COLUMNS = {"failures", "snapshots", "trials", "calls", "grid_size"}
STR_COLUMNS = {"method"}


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)

    def column(self, name):
        j = self.columns.index(name)
        return [row[j] for row in self.rows]

    def select(self, **where):
        """Rows (as dicts) whose columns equal the given values."""
        out = []
        for row in self.rows:
            rec = dict(zip(self.columns, row))
            if all(rec[k] == v for k, v in where.items()):
                out.append(rec)
        return out

    def drop(self, *names) -> "ResultTable":
        keep = [j for j, c in enumerate(self.columns) if c not in names]
        return ResultTable([self.columns[j] for j in keep],
                           [tuple(row[j] for j in keep) for row in self.rows])


def _fmt_csv(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, int)) and not isinstance(value, float):
        return str(int(value))
    return format(float(value), ".17g")


def _fmt_txt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    x = float(value)
    return "nan" if math.isnan(x) else f"{x:.6g}"


def format_table(table: ResultTable, fmt: str = "csv") -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown output format {fmt!r}; expected one of {FORMATS}")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([_fmt_csv(v) for v in row])
        return buf.getvalue()
    cells = [list(table.columns)] + [[_fmt_txt(v) for v in row] for row in table.rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(table.columns))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def emit_results(table: ResultTable, path, fmt: str = "csv") -> None:
    """Write ``table`` to ``path``; an empty table gives a header-only file."""
    text = format_table(table, fmt)
    path = Path(path)
    try:
        with open(path, "w", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror}") from exc


def _parse(name, text):
    if name in STR_COLUMNS:
        return text
    if name in INT_COLUMNS:
        return int(text)
    return float(text)


def parse_results(text: str) -> ResultTable:
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    rows = [tuple(_parse(c, v) for c, v in zip(columns, row)) for row in reader if row]
    return ResultTable(columns, rows)


def read_results(path) -> ResultTable:
    """Inverse of :func:`emit_results` for the csv format."""
    return parse_results(Path(path).read_text())
