"""Ingestion of SNP-style tables and raster export of variable subsets.

Input files are comma- or tab-separated (auto-detected from the header
line) with one named column per variable, cells in {0, 1, 2}, and "NA" or
an empty cell for a missing value.  Lines starting with '#' are skipped,
which lets the files produced by this package be read back directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset

MISSING_MARKERS = ("", "NA")

# 0 / 1 / 2 cell value -> pixel; chosen so the two homozygous codes get
# saturated colors and the heterozygous code stays white
RASTER_COLORS = {
    0: (0, 128, 0),  # green
    1: (255, 255, 255),  # white
    2: (255, 192, 203),  # pink
}


class TableParseError(ValueError):
    """A malformed input table; carries the 1-based file line and the column."""

    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        place = []
        if line is not None:
            place.append(f"line {line}")
        if column is not None:
            place.append(f"column {column!r}")
        suffix = f" ({', '.join(place)})" if place else ""
        super().__init__(message + suffix)
        self.line = line
        self.column = column


@dataclass
class RawTable:
    """A parsed table: variable values (NaN = missing) plus the binary response."""

    names: list[str]
    values: np.ndarray  # (n, p) float64 with NaN for missing cells
    response: np.ndarray  # (n,) int8
    response_name: str

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def missing_count(self) -> int:
        return int(np.isnan(self.values).sum())


def load_table(path, response) -> RawTable:
    """Parse a delimiter-separated file; ``response`` is a column name or position.

    Cells outside {0, 1, 2, NA, empty} and ragged rows raise
    :class:`TableParseError` with the file location.  The response column
    must be fully observed and binary.
    """
    path = Path(path)
    lines = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        if raw.startswith("#"):
            continue
        if raw.strip() == "" and not lines:
            continue
        lines.append((lineno, raw))
    if not lines:
        raise TableParseError(f"{path}: no content")
    header_line, header_raw = lines[0]
    delim = "\t" if "\t" in header_raw else ","
    header = [h.strip() for h in header_raw.split(delim)]
    if isinstance(response, int):
        if not -len(header) <= response < len(header):
            raise TableParseError(
                f"response position {response} outside the {len(header)} columns",
                line=header_line,
            )
        response_name = header[response]
    else:
        response_name = response
        if response_name not in header:
            raise TableParseError(
                f"response column {response_name!r} not in header", line=header_line
            )
    r_idx = header.index(response_name)
    names = [h for i, h in enumerate(header) if i != r_idx]
    if len(set(header)) != len(header):
        raise TableParseError("duplicate column names in header", line=header_line)

    values = []
    yvals = []
    for lineno, raw in lines[1:]:
        cells = [c.strip() for c in raw.split(delim)]
        if len(cells) != len(header):
            raise TableParseError(
                f"expected {len(header)} cells, found {len(cells)}", line=lineno
            )
        row = np.empty(len(header) - 1)
        col = 0
        for i, cell in enumerate(cells):
            if i == r_idx:
                if cell not in ("0", "1"):
                    raise TableParseError(
                        f"response cell {cell!r} is not 0 or 1",
                        line=lineno,
                        column=response_name,
                    )
                yvals.append(int(cell))
                continue
            if cell in MISSING_MARKERS:
                row[col] = np.nan
            elif cell in ("0", "1", "2"):
                row[col] = float(cell)
            else:
                raise TableParseError(
                    f"cell {cell!r} is not one of 0, 1, 2, NA",
                    line=lineno,
                    column=header[i],
                )
            col += 1
        values.append(row)
    if not values:
        raise TableParseError(f"{path}: header but no data rows")
    return RawTable(
        names=names,
        values=np.asarray(values),
        response=np.asarray(yvals, dtype=np.int8),
        response_name=response_name,
    )


def impute(table: RawTable, seed: int = 0) -> RawTable:
    """Fill missing cells by sampling each column's observed value frequencies."""
    rng = np.random.default_rng(seed)
    values = table.values.copy()
    for j in range(table.p):
        col = values[:, j]
        miss = np.isnan(col)
        if not miss.any():
            continue
        observed = col[~miss]
        if observed.size == 0:
            raise ValueError(
                f"column {table.names[j]!r} has no observed values to impute from"
            )
        levels, counts = np.unique(observed, return_counts=True)
        col[miss] = rng.choice(levels, size=int(miss.sum()), p=counts / counts.sum())
    return RawTable(list(table.names), values, table.response.copy(), table.response_name)


def drop_uninformative(
    table: RawTable, drop_zero_variance: bool = False
) -> tuple[RawTable, np.ndarray]:
    """Remove columns whose observed entries are all zero.

    With ``drop_zero_variance`` every constant column goes, not just the
    all-zero ones.  Returns the reduced table and the dropped column
    indices (positions in the input table).
    """
    drop = np.zeros(table.p, dtype=bool)
    for j in range(table.p):
        col = table.values[:, j]
        observed = col[~np.isnan(col)]
        if observed.size == 0:
            drop[j] = True
        elif drop_zero_variance:
            drop[j] = observed.min() == observed.max()
        else:
            drop[j] = observed.max() == 0.0
    keep = ~drop
    reduced = RawTable(
        names=[n for n, k in zip(table.names, keep) if k],
        values=table.values[:, keep],
        response=table.response.copy(),
        response_name=table.response_name,
    )
    return reduced, np.flatnonzero(drop)


def to_dataset(table: RawTable) -> Dataset:
    """Convert a fully observed table into a Dataset."""
    if table.missing_count:
        raise ValueError(
            f"table still has {table.missing_count} missing cells; impute first"
        )
    return Dataset(table.values.astype(np.int8), table.response, list(table.names))


def write_dataset_csv(
    dataset: Dataset, path, response_name: str = "y", comments: list[str] | None = None
) -> Path:
    """Comma-separated dump with variable names and the response as last column."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {c}" for c in comments or []]
    lines.append(",".join(dataset.names() + [response_name]))
    for i in range(dataset.n):
        row = dataset.x[i].astype(int).astype(str).tolist()
        lines.append(",".join(row + [str(int(dataset.y[i]))]))
    path.write_text("\n".join(lines) + "\n")
    return path


def raster_export(dataset: Dataset, selected, path) -> Path:
    """Write a binary portable pixmap of the selected columns.

    One pixel row per observation with the response-1 group on top, one
    pixel column per selected variable, colored green / white / pink for
    codes 0 / 1 / 2.
    """
    selected = np.asarray(selected, dtype=int)
    if selected.ndim != 1 or selected.size == 0:
        raise ValueError("need a non-empty 1-d list of column indices")
    if selected.min() < 0 or selected.max() >= dataset.p:
        raise ValueError(
            f"column index out of range [0, {dataset.p}): {selected.min()}..{selected.max()}"
        )
    order = np.concatenate([np.flatnonzero(dataset.y == 1), np.flatnonzero(dataset.y == 0)])
    codes = dataset.x[np.ix_(order, selected)]
    lut = np.zeros((3, 3), dtype=np.uint8)
    for code, rgb in RASTER_COLORS.items():
        lut[code] = rgb
    pixels = lut[codes]
    height, width = codes.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())
    return path
