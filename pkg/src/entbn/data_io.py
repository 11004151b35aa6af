"""CSV dataset files: 50 self-describing columns named T_<CLASS> / Q_<CLASS>.

Columns may appear in any order in the file; ingestion reorders them to the
canonical layout (title block then question block). Every cell must be 0 or
1. Errors name the offending row and column.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .catalog import canonical_column_names, canonical_variables
from .core import Dataset
from .errors import IngestionError


def ingest_csv(path) -> Dataset:
    """Read a dataset file with the 50 canonical columns in any order."""
    expected = canonical_column_names()
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            try:
                header = next(reader)
            except StopIteration:
                raise IngestionError(f"{path}: empty file") from None
            header = [name.strip() for name in header]
            unknown = [c for c in header if c not in expected]
            if unknown:
                raise IngestionError(f"{path}: unknown column {unknown[0]!r}")
            missing = [c for c in expected if c not in header]
            if missing:
                raise IngestionError(f"{path}: missing column {missing[0]!r}")
            if len(header) != len(expected):
                raise IngestionError(f"{path}: duplicate columns in header")
            column_of = {name: pos for pos, name in enumerate(header)}
            reorder = [column_of[name] for name in expected]
            rows = []
            for line, record in enumerate(reader, start=2):
                if len(record) != len(expected):
                    raise IngestionError(
                        f"{path}: line {line} has {len(record)} cells, "
                        f"expected {len(expected)}"
                    )
                parsed = []
                for pos in reorder:
                    cell = record[pos].strip()
                    if cell not in ("0", "1"):
                        raise IngestionError(
                            f"{path}: line {line}, column {header[pos]}: "
                            f"cell value {record[pos]!r} is not 0 or 1"
                        )
                    parsed.append(int(cell))
                rows.append(parsed)
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from None
    records = np.array(rows, dtype=np.uint8).reshape(len(rows), len(expected))
    return Dataset(canonical_variables(), records)


def write_csv(d: Dataset, path) -> None:
    """Write a dataset in its own column order, one record per line."""
    lines = [",".join(v.name for v in d.variables)]
    for row in d.records:
        lines.append(",".join(str(int(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
