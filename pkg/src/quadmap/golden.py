"""Transcribed reference tables shipped with the package.

Values are kept as the printed strings; ``exact`` parses them into
Fractions (decimal literals convert exactly).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

TABLES = ("fixed_points", "degrees", "residuals_d2", "residuals_d3", "reference_b", "reference_c")


@dataclass
class GoldenTable:
    name: str
    columns: list[str]
    rows: list[dict[str, str]]

    def column(self, name: str) -> list[str]:
        return [r[name] for r in self.rows]

    def exact(self, name: str) -> list[Fraction | None]:
        return [Fraction(v) if v != "" else None for v in self.column(name)]

    def ints(self, name: str) -> list[int]:
        return [int(v) for v in self.column(name)]


def load(name: str) -> GoldenTable:
    if name not in TABLES:
        raise KeyError(f"unknown golden table {name!r}; have {TABLES}")
    text = resources.files("quadmap.data").joinpath(f"{name}.csv").read_text(encoding="utf-8")
    reader = csv.DictReader(text.splitlines())
    return GoldenTable(name, list(reader.fieldnames or []), list(reader))


def load_all() -> dict[str, GoldenTable]:
    return {name: load(name) for name in TABLES}


def degree_sequences() -> dict[str, list[int]]:
    t = load("degrees")
    return {k: t.ints(k) for k in ("d1", "d2", "d3")}


def isolated_counts() -> dict[int, int]:
    t = load("fixed_points")
    return dict(zip(t.ints("N"), t.ints("isolated")))
