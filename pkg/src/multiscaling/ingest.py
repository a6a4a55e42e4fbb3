"""Data ingestion: price/return CSVs in, Series out, plus the single-column
series format the ``generate`` subcommand emits.

Series files are plain CSV with ``#``-comment headers, one value per line,
written with 17 significant digits so a write/read round trip is
bit-identical.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .core import Series
from .errors import DataError, DomainError

TRANSFORMS = ("log_returns", "raw_increments", "levels")
MIN_POINTS_WARN = 256


@dataclass(frozen=True)
class IngestSpec:
    """How to turn a CSV file into a Series.

    ``column`` selects by position (int) or header name (str).  When
    ``transform`` is None it is resolved from the file itself: files carrying
    a ``# kind=increments`` comment are read as raw increments, anything else
    as price levels converted to log-returns.  Rows with missing values are
    dropped; under log_returns non-positive prices are dropped too, with a
    count kept in the output provenance.
    """

    path: str | Path
    column: int | str = 0
    date_column: int | str | None = None
    transform: str | None = None

    def __post_init__(self):
        if self.transform is not None and self.transform not in TRANSFORMS:
            raise DomainError(f"transform must be one of {TRANSFORMS}")


def _comment_header(path: Path) -> dict[str, str]:
    meta = {}
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if not line.startswith("#"):
                    break
                body = line.lstrip("#").strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    meta[key.strip()] = val.strip()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return meta


def _first_data_line(path: Path) -> str | None:
    with open(path) as fh:
        for line in fh:
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                return stripped
    return None


def _select(frame: pd.DataFrame, selector, what: str) -> pd.Series:
    if isinstance(selector, int) or (isinstance(selector, str)
                                     and selector.lstrip("-").isdigit()):
        idx = int(selector)
        if not -frame.shape[1] <= idx < frame.shape[1]:
            raise DataError(f"{what} index {idx} out of range "
                            f"({frame.shape[1]} columns)")
        return frame.iloc[:, idx]
    if selector not in frame.columns:
        raise DataError(f"no column named {selector!r} "
                        f"(have {list(frame.columns)})")
    return frame[selector]


def ingest(spec: IngestSpec) -> Series:
    """Read, order, clean and transform one CSV column into a Series."""
    path = Path(spec.path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    meta = _comment_header(path)
    first = _first_data_line(path)
    if first is None:
        raise DataError(f"{path} has no data rows")
    cells = first.split(",")
    probe = cells[spec.column] if isinstance(spec.column, int) \
        and spec.column < len(cells) else cells[0]
    try:
        float(probe)
        header = None
    except ValueError:
        header = 0
    if isinstance(spec.column, str) and not spec.column.lstrip("-").isdigit():
        header = 0
    try:
        frame = pd.read_csv(path, comment="#", header=header,
                            skip_blank_lines=True)
    except Exception as exc:
        raise DataError(f"unparseable CSV {path}: {exc}") from exc
    if frame.empty:
        raise DataError(f"{path} contains no data")

    if spec.date_column is not None:
        dates = pd.to_datetime(_select(frame, spec.date_column, "date column"),
                               errors="coerce")
        frame = frame.loc[dates.sort_values(kind="stable").index]

    col = pd.to_numeric(_select(frame, spec.column, "column"), errors="coerce")
    values = col.to_numpy(dtype=np.float64)
    n_raw = values.size
    keep = np.isfinite(values)

    transform = spec.transform
    if transform is None:
        kind = meta.get("kind")
        transform = {"increments": "raw_increments",
                     "levels": "levels"}.get(kind, "log_returns")
    if transform == "log_returns":
        keep &= values > 0
    dropped = int(n_raw - keep.sum())
    values = values[keep]
    if values.size == 0:
        raise DataError(f"column has no usable values in {path}")
    if dropped:
        warnings.warn(f"dropped {dropped} missing/invalid rows from {path}",
                      stacklevel=2)

    if transform == "log_returns":
        if values.size < 2:
            raise DataError("need at least 2 prices to form log-returns")
        out = Series(np.diff(np.log(values)), kind="increments",
                     label=path.name)
    elif transform == "raw_increments":
        out = Series(values, kind="increments", label=path.name)
    else:
        out = Series(values, kind="levels", label=path.name)
    if len(out) < MIN_POINTS_WARN:
        warnings.warn(f"only {len(out)} points ingested from {path}; "
                      "scaling estimates will be very noisy", stacklevel=2)
    return out.replace_values(out.values, source=str(path),
                              dropped_rows=dropped, transform=transform)


def write_series(series: Series, path: str | Path) -> None:
    """Single-column CSV with comment headers; 17 significant digits."""
    path = Path(path)
    lines = [f"# kind={series.kind}"]
    if series.label:
        lines.append(f"# label={series.label}")
    prov = series.seed_provenance or {}
    for key in ("generator", "master_seed", "realization", "surrogate"):
        if key in prov:
            lines.append(f"# {key}={prov[key]}")
    lines.extend(format(v, ".17g") for v in series.values)
    path.write_text("\n".join(lines) + "\n")


def read_series(path: str | Path) -> Series:
    """Read a file written by :func:`write_series` (bit-identical values)."""
    return ingest(IngestSpec(path=path, transform=None))
