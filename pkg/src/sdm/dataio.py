"""CSV/JSON input and output, and series standardization.

Floats are written with 17 significant digits so every value round-trips.
CSV artifacts may start with a single ``#`` comment line holding a JSON
object (the run configuration); readers skip it.
"""

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DataError

STANDARDIZE_MODES = ("none", "global-z", "expanding-z")


def fmt(value):
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.17g}"


def atomic_write_text(path, text):
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    atomic_write_text(path, dump_json(obj))


def csv_text(header, rows, meta=None):
    buf = io.StringIO()
    if meta is not None:
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def read_csv_meta(path):
    """The JSON object on a CSV artifact's leading comment line, or None."""
    with open(path, newline="") as fh:
        first = fh.readline()
    if first.startswith("#"):
        return json.loads(first[1:])
    return None


def load_pair(path, x_col="x", y_col="y", min_rows=2):
    """Read two numeric columns from a CSV file with a header row.

    Parameters
    ----------
    path : str or Path
    x_col, y_col : str or int
        Column names, or 0-based column positions.
    min_rows : int
        Minimum number of data rows; fewer raises `DataError`.

    Returns
    -------
    x, y : numpy.ndarray
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        lines = [(n, line) for n, line in enumerate(fh, start=1) if not line.startswith("#")]
    if not lines:
        raise DataError(f"{path}: empty file")
    reader = csv.reader([line for _, line in lines])
    rows = list(reader)
    header = [h.strip() for h in rows[0]]

    def index(col):
        if isinstance(col, int):
            if not 0 <= col < len(header):
                raise DataError(f"{path}: column position {col} out of range")
            return col
        if col not in header:
            raise DataError(f"{path}: missing column {col!r}; header is {header}")
        return header.index(col)

    ix, iy = index(x_col), index(y_col)
    x, y = [], []
    for (lineno, _), row in zip(lines[1:], rows[1:]):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            xv, yv = float(row[ix]), float(row[iy])
        except ValueError as exc:
            raise DataError(f"{path}: line {lineno}: non-numeric value ({exc})") from exc
        if not (math.isfinite(xv) and math.isfinite(yv)):
            raise DataError(f"{path}: line {lineno}: non-finite value")
        x.append(xv)
        y.append(yv)
    if len(x) < min_rows:
        raise DataError(f"{path}: {len(x)} data rows, need at least {min_rows}")
    return np.array(x), np.array(y)


def standardize(series, mode="none", min_history=None):
    """Rescale a series to zero mean and unit variance.

    ``global-z`` uses the full-sample mean and standard deviation, so each
    point is scaled with information from its future. ``expanding-z`` scales
    each point by the mean and standard deviation of the points up to and
    including it and never looks ahead. With ``min_history=m`` the first
    ``m - 1`` points are scaled by the statistics of the first ``m`` points
    instead, which avoids the zero variance of very short or constant
    prefixes at the cost of a short lookahead inside that prefix.
    """
    if mode not in STANDARDIZE_MODES:
        raise ConfigurationError(f"unknown standardize mode {mode!r}; expected one of {STANDARDIZE_MODES}")
    s = np.asarray(series, dtype=float)
    if mode == "none":
        return s.copy()
    if len(s) < 2:
        raise DataError("standardization needs at least 2 points")
    if mode == "global-z":
        sd = s.std()
        if sd == 0:
            raise DataError("series has zero variance")
        return (s - s.mean()) / sd

    n = np.arange(1, len(s) + 1)
    mean = np.cumsum(s) / n
    # Welford-free but shifted to limit cancellation
    shifted = s - s[0]
    var = np.cumsum(shifted**2) / n - (np.cumsum(shifted) / n) ** 2
    var = np.maximum(var, 0.0)
    start = 1
    if min_history is not None:
        m = int(min_history)
        if not 2 <= m <= len(s):
            raise ConfigurationError(f"min_history must lie in [2, {len(s)}], got {m}")
        mean[:m - 1] = mean[m - 1]
        var[:m - 1] = var[m - 1]
        start = 0
    sd = np.sqrt(var)
    zero = np.flatnonzero(sd[start:] <= 1e-12 * max(1.0, np.abs(s).max())) + start
    if zero.size:
        raise DataError(
            f"zero variance in expanding window ending at row {zero[0] + 1}; "
            "configure a minimum history"
        )
    out = np.empty_like(s)
    if start == 1:
        out[0] = 0.0
    out[start:] = (s[start:] - mean[start:]) / sd[start:]
    return out
