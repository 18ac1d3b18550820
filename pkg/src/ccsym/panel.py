"""Dated return panels: parsing, cleaning and yearly slicing.

Two text layouts are understood:

* ``csv``: a header row (date column first) followed by ISO-dated rows.
* ``french``: the Kenneth French data-library CSV layout.  A free-text
  preamble precedes the data; the first line whose leading field is an
  8-digit ``YYYYMMDD`` date starts the block, the line above it holds the
  column labels, and the block ends at the first blank or non-date line
  (annual tables and footers that follow are ignored).

Cells equal to -99.99, -999 or -9999, empty cells and NaN mark missing
values; rows with any missing value are dropped and counted.
"""

import csv
import datetime as dt
import io
import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import InputError

__all__ = [
    "MISSING_CODES",
    "FORMATS",
    "ReturnPanel",
    "YearWindow",
    "parse_panel",
    "read_panel",
    "drop_missing",
    "split_by_year",
    "panel_to_csv",
]

MISSING_CODES = (-99.99, -999.0, -9999.0)
FORMATS = ("csv", "french")
_FORMAT_ALIASES = {"csv": "csv", "generic-csv": "csv", "french": "french", "french-lib": "french"}
_YYYYMMDD = re.compile(r"^\d{8}$")


@dataclass(frozen=True)
class ReturnPanel:
    dates: np.ndarray
    values: np.ndarray
    labels: tuple
    missing_mask: np.ndarray
    dropped_rows: int = 0

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise InputError(f"values must be a T x N matrix, got shape {values.shape}")
        mask = np.asarray(self.missing_mask, dtype=bool)
        if dates.shape != (values.shape[0],) or mask.shape != values.shape:
            raise InputError("dates, values and missing_mask have inconsistent shapes")
        if len(self.labels) != values.shape[1]:
            raise InputError(f"{len(self.labels)} labels for {values.shape[1]} columns")
        if len(dates) > 1 and not np.all(dates[1:] > dates[:-1]):
            bad = int(np.argmin(dates[1:] > dates[:-1])) + 1
            raise InputError(f"dates must be strictly increasing (row {bad}: {dates[bad]})")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "missing_mask", mask)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def t_len(self) -> int:
        return self.values.shape[0]

    @property
    def n_series(self) -> int:
        return self.values.shape[1]

    @property
    def years(self) -> np.ndarray:
        return self.dates.astype("datetime64[Y]").astype(np.int64) + 1970

    def take(self, rows) -> "ReturnPanel":
        return ReturnPanel(self.dates[rows], self.values[rows], self.labels, self.missing_mask[rows], 0)


class YearWindow(NamedTuple):
    year: int
    panel: ReturnPanel
    skipped: bool


def _decode(source):
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        try:
            return bytes(source).decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise InputError(f"input is not valid UTF-8: {exc}") from None
    if isinstance(source, str):
        return source.lstrip("\ufeff")
    raise TypeError(f"cannot read panel from {type(source).__name__}")


def _parse_cell(text, line_no):
    s = text.strip()
    if s == "" or s.lower() in ("nan", "na"):
        return np.nan, True
    try:
        v = float(s)
    except ValueError:
        raise InputError(f"line {line_no}: non-numeric cell {s!r}") from None
    if v in MISSING_CODES or not np.isfinite(v):
        return np.nan, True
    return v, False


def _french_date(text, line_no):
    try:
        return dt.datetime.strptime(text, "%Y%m%d").date()
    except ValueError:
        raise InputError(f"line {line_no}: malformed date {text!r}") from None


def _iso_date(text, line_no):
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise InputError(f"line {line_no}: malformed date {text!r}") from None


def _rows_generic(text):
    rows = [(i + 1, r) for i, r in enumerate(csv.reader(io.StringIO(text))) if any(c.strip() for c in r)]
    if not rows:
        raise InputError("empty input")
    first_no, first = rows[0]
    try:
        dt.date.fromisoformat(first[0].strip())
        labels = [f"c{i}" for i in range(1, len(first))]
    except ValueError:
        labels = [c.strip() for c in first[1:]]
        rows = rows[1:]
    return labels, [(no, _iso_date(r[0], no), r[1:]) for no, r in rows]


def _rows_french(text):
    lines = text.splitlines()
    start = None
    for i, line in enumerate(lines):
        head = line.split(",", 1)[0].strip()
        if _YYYYMMDD.match(head):
            start = i
            break
    if start is None:
        raise InputError("no YYYYMMDD data block found")
    labels = None
    for j in range(start - 1, -1, -1):
        if lines[j].strip():
            fields = next(csv.reader([lines[j]]))
            if not _YYYYMMDD.match(fields[0].strip()):
                labels = [c.strip() for c in fields[1:]]
            break
    out = []
    for i in range(start, len(lines)):
        line = lines[i]
        if not line.strip():
            break
        fields = next(csv.reader([line]))
        head = fields[0].strip()
        if not _YYYYMMDD.match(head):
            break
        out.append((i + 1, _french_date(head, i + 1), fields[1:]))
    if labels is None:
        labels = [f"c{i}" for i in range(1, len(out[0][2]) + 1)]
    return labels, out


def read_panel_raw(source, fmt: str = "csv") -> ReturnPanel:
    """Parse without dropping rows; missing cells are NaN and flagged in the mask."""
    try:
        fmt = _FORMAT_ALIASES[fmt]
    except KeyError:
        raise InputError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}") from None
    text = _decode(source)
    labels, rows = _rows_french(text) if fmt == "french" else _rows_generic(text)
    if len(labels) < 2:
        raise InputError(f"need at least 2 data columns, found {len(labels)}")
    values = np.empty((len(rows), len(labels)))
    mask = np.zeros(values.shape, dtype=bool)
    dates = []
    for k, (no, date, cells) in enumerate(rows):
        if len(cells) != len(labels):
            raise InputError(f"line {no}: expected {len(labels)} values, found {len(cells)}")
        for i, c in enumerate(cells):
            values[k, i], mask[k, i] = _parse_cell(c, no)
        dates.append(date)
    return ReturnPanel(np.array(dates, dtype="datetime64[D]"), values, labels, mask)


def drop_missing(panel: ReturnPanel) -> ReturnPanel:
    """Listwise deletion of rows with any missing entry."""
    keep = ~panel.missing_mask.any(axis=1)
    n_drop = int(np.count_nonzero(~keep))
    if not keep.any():
        raise InputError("zero retained rows after dropping missing values")
    kept = panel.take(keep)
    return ReturnPanel(kept.dates, kept.values, kept.labels, kept.missing_mask, panel.dropped_rows + n_drop)


def parse_panel(source, fmt: str = "csv") -> ReturnPanel:
    """Parse bytes, text or a file object into a cleaned :class:`ReturnPanel`."""
    return drop_missing(read_panel_raw(source, fmt))


def read_panel(path, fmt: str = "csv") -> ReturnPanel:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_panel(data, fmt)


def split_by_year(panel: ReturnPanel, min_obs: int = 50) -> list[YearWindow]:
    """One window per calendar year in date order; short years are flagged as skipped."""
    if panel.t_len == 0:
        raise InputError("panel is empty")
    years = panel.years
    # dates are sorted, so each year is one contiguous run
    cuts = np.flatnonzero(np.diff(years)) + 1
    out = []
    for rows in np.split(np.arange(panel.t_len), cuts):
        sub = panel.take(slice(rows[0], rows[-1] + 1))
        out.append(YearWindow(int(years[rows[0]]), sub, sub.t_len < min_obs))
    return out


def panel_to_csv(panel: ReturnPanel) -> str:
    """Generic-CSV serialization; floats use ``repr`` so parsing round-trips exactly."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", *panel.labels])
    for d, row in zip(panel.dates, panel.values):
        writer.writerow([str(d), *(repr(float(v)) for v in row)])
    return buf.getvalue()
