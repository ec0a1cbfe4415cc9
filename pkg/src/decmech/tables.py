"""Minimal tabular container with deterministic CSV emission."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .errors import IoError


@dataclass
class Table:
    columns: Tuple[str, ...]
    rows: List[Tuple]

    def __post_init__(self):
        self.columns = tuple(self.columns)
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row width must match column count")

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def format_csv(table: Table) -> str:
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(_format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def emit_csv(table: Table, path) -> None:
    """Write UTF-8 CSV with a header row; floats use 9 significant digits.
    Identical inputs produce byte-identical files."""
    if not table.rows:
        raise IoError("refusing to write an empty table")
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_csv(table))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def parse_csv(text: str) -> Table:
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = tuple(lines[0].split(","))
    rows = []
    for ln in lines[1:]:
        cells = []
        for cell in ln.split(","):
            try:
                cells.append(float(cell))
            except ValueError:
                cells.append(cell)
        rows.append(tuple(cells))
    return Table(columns=header, rows=rows)
