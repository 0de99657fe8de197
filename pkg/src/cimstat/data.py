"""Column-oriented datasets and CSV interchange."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import OOCTZT
from .exceptions import InvalidInputError
from .tau import DimensionKind, classify_dimension

__all__ = ["Dataset", "read_csv", "write_csv"]


@dataclass
class Dataset:
    """Named real-valued columns of equal length.

    ``kinds`` is filled with :func:`classify_dimension` for any column not
    given explicitly.
    """

    columns: dict
    kinds: dict = field(default_factory=dict)
    ooctzt: int = OOCTZT

    def __post_init__(self):
        cols = {}
        length = None
        for name, values in self.columns.items():
            arr = np.asarray(values, dtype=float)
            if arr.ndim != 1:
                raise InvalidInputError(f"column {name!r} is not one-dimensional")
            if length is None:
                length = arr.shape[0]
            elif arr.shape[0] != length:
                raise InvalidInputError(
                    f"column {name!r} has {arr.shape[0]} rows, expected {length}")
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"column {name!r} has non-finite values")
            cols[str(name)] = arr
        if len(cols) != len(self.columns):
            raise InvalidInputError("column names must be unique")
        self.columns = cols
        kinds = {}
        for name, arr in cols.items():
            if name in self.kinds:
                kinds[name] = DimensionKind(self.kinds[name])
            elif arr.shape[0] >= 2:
                kinds[name] = classify_dimension(arr, self.ooctzt)
            else:
                kinds[name] = DimensionKind.CONTINUOUS
        self.kinds = kinds

    @property
    def labels(self) -> list:
        return list(self.columns)

    @property
    def n_rows(self) -> int:
        return next(iter(self.columns.values())).shape[0] if self.columns else 0

    def __getitem__(self, name):
        return self.columns[name]

    def select(self, names) -> "Dataset":
        missing = [c for c in names if c not in self.columns]
        if missing:
            raise KeyError(missing[0])
        return Dataset({c: self.columns[c] for c in names},
                       {c: self.kinds[c] for c in names}, self.ooctzt)

    def to_csv(self, path=None) -> str | None:
        return write_csv(self.columns, path)


def _format(v: float) -> str:
    return repr(float(v))


def write_csv(columns: dict, path=None):
    """Write columns with a header row; returns the text when ``path`` is None."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    w.writerow(names)
    arrays = [np.asarray(columns[c], dtype=float) for c in names]
    for row in zip(*arrays):
        w.writerow([_format(v) for v in row])
    text = buf.getvalue()
    if path is None:
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return None


def read_csv(source, drop_incomplete_rows: bool = False) -> Dataset:
    """Parse a headed CSV of decimal reals.

    Empty or non-numeric cells raise :class:`InvalidInputError` naming the
    row (1-based, header is row 1) and column, unless ``drop_incomplete_rows``
    is set, in which case rows with empty cells are removed.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, newline="") as fh:
            text = fh.read()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InvalidInputError("empty CSV")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise InvalidInputError("duplicate column names in header")
    data = [[] for _ in header]
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise InvalidInputError(
                f"row {lineno}: expected {len(header)} cells, found {len(row)}")
        cells = [c.strip() for c in row]
        if any(c == "" for c in cells):
            if drop_incomplete_rows:
                continue
            col = header[cells.index("")]
            raise InvalidInputError(f"row {lineno}, column {col!r}: empty cell")
        parsed = []
        for name, c in zip(header, cells):
            try:
                v = float(c)
            except ValueError:
                raise InvalidInputError(
                    f"row {lineno}, column {name!r}: not a number: {c!r}") from None
            if not math.isfinite(v):
                raise InvalidInputError(f"row {lineno}, column {name!r}: non-finite value")
            parsed.append(v)
        for d, v in zip(data, parsed):
            d.append(v)
    return Dataset({h: np.asarray(d) for h, d in zip(header, data)})
