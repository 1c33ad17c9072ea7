"""Reading the pinned doublewell CSV artifacts.

Files start with a `# doublewell <version> config={...}` comment carrying the
fully resolved run configuration, followed by a column-name row.  Nothing is
recomputed here: missing data is an error, never interpolated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class DataError(ValueError):
    pass


@dataclass
class Table:
    columns: dict[str, np.ndarray]
    config: dict = field(default_factory=dict)
    path: str = ""

    def __getitem__(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise DataError(f"{self.path}: required column '{name}' is missing "
                            f"(have {sorted(self.columns)})")
        return self.columns[name]

    def require(self, *names: str) -> None:
        for name in names:
            self[name]

    @property
    def nrows(self) -> int:
        first = next(iter(self.columns.values()))
        return len(first)


def read_table(path: str | Path) -> Table:
    path = Path(path)
    config: dict = {}
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                marker = "config="
                if marker in line and not config:
                    try:
                        config = json.loads(line.split(marker, 1)[1])
                    except json.JSONDecodeError:
                        config = {}
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    if header is None:
        raise DataError(f"{path}: no header row found")
    if len(rows) == 0:
        raise DataError(f"{path}: no data rows")
    if len(rows) == 1:
        raise DataError(f"{path}: a single data row cannot be plotted")
    bad = [i for i, row in enumerate(rows) if len(row) != len(header)]
    if bad:
        raise DataError(f"{path}: row {bad[0] + 1} has {len(rows[bad[0]])} "
                        f"fields, expected {len(header)}")
    columns = {}
    data = np.array(rows, dtype=object)
    for j, name in enumerate(header):
        col = data[:, j]
        try:
            columns[name] = col.astype(np.float64)
        except ValueError:
            columns[name] = col.astype(str)
    return Table(columns=columns, config=config, path=str(path))


def sweep_axis_label(config: dict) -> str:
    """X-axis label for sweep CSVs, from the embedded run configuration."""
    command = config.get("command", "")
    mode = config.get("mode", "")
    unit = "U0" if mode == "one-level" else "hw"
    if command == "sweep-interaction":
        return f"interaction U0 [{unit}]"
    if command == "sweep-tilt":
        return f"tilt dV [{unit}]"
    return "swept parameter"


def energy_axis_label(config: dict) -> str:
    unit = "U0" if config.get("mode", "") == "one-level" else "hw"
    return f"energy [{unit}]"
