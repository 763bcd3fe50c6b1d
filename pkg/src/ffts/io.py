"""CSV ingestion and result serialisation.

Wide layout (canonical)::

    t,1,2,...,12
    2017-05-01,15.1,15.3,...

The header's first cell names the id column; the remaining cells are the
grid points.  One row per curve, in time order.  Labels such as ``x1`` or
``x_1`` are read by their numeric suffix; labels without one fall back to
the grid ``1..J``.

Long layout (accepted on input only)::

    curve_id,x,value

is pivoted to wide, rows ordered by curve id (numerically when every id is a
number) and columns by ``x``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from pathlib import Path

import numpy as np

from .core import FunctionalSeries, Grid
from .exceptions import DataError, ParseError

LONG_HEADER = ("curve_id", "x", "value")


def fmt(value) -> str:
    """Shortest round-trip text for a number; integers without a trailing ``.0``."""
    v = float(value)
    if math.isfinite(v) and v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _number(cell, line, col):
    text = cell.strip()
    if text == "":
        raise ParseError(f"line {line}, column {col}: missing value", line, col)
    try:
        val = float(text)
    except ValueError:
        raise ParseError(f"line {line}, column {col}: non-numeric value {text!r}", line, col) from None
    if not math.isfinite(val):
        raise ParseError(f"line {line}, column {col}: non-finite value {text!r}", line, col)
    return val


def _rows(path):
    with open(path, newline="") as fh:
        rows = [(n, row) for n, row in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in row)]
    if not rows:
        raise ParseError("empty CSV file", 1)
    return rows


def ingest_csv(path) -> FunctionalSeries:
    """Read a functional time series from wide or long CSV.

    Raises
    ------
    ParseError
        On ragged rows, duplicate ``(curve_id, x)`` pairs, missing or
        non-numeric cells; the message names the line and column.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    rows = _rows(path)
    header = tuple(c.strip() for c in rows[0][1])
    if tuple(h.lower() for h in header) == LONG_HEADER:
        return _ingest_long(rows, path.stem)
    return _ingest_wide(rows, path.stem)


_SUFFIX = re.compile(r"^[^\d.+-]*([-+]?\d*\.?\d+(?:[eE][-+]?\d+)?)$")


def _grid_from_labels(labels, line=1):
    for parse in (float, lambda c: float(_SUFFIX.match(c).group(1))):
        try:
            pts = [parse(c.strip()) for c in labels]
        except (ValueError, AttributeError):
            continue
        if not (all(math.isfinite(p) for p in pts) and np.all(np.diff(pts) > 0)):
            raise ParseError(f"line {line}: grid labels must be finite and strictly increasing", line)
        return pts
    return list(range(1, len(labels) + 1))


def _ingest_wide(rows, label):
    line0, header = rows[0]
    if len(header) < 3:
        raise ParseError("wide layout needs an id column and at least two grid columns", line0)
    grid_pts = _grid_from_labels(header[1:], line0)
    width = len(header)
    ids, vals = [], []
    for line, row in rows[1:]:
        if len(row) != width:
            raise ParseError(f"line {line}: expected {width} cells, found {len(row)}", line)
        ids.append(row[0].strip())
        vals.append([_number(c, line, j + 1) for j, c in enumerate(row) if j > 0])
    if not vals:
        raise ParseError("no data rows", line0)
    if len(set(ids)) != len(ids):
        dup = next(i for i in ids if ids.count(i) > 1)
        raise ParseError(f"duplicate curve id {dup!r}")
    try:
        grid = Grid(grid_pts)
    except DataError as exc:
        raise ParseError(f"line {line0}: bad grid header ({exc})", line0) from None
    return FunctionalSeries(np.array(vals), grid, label, tuple(ids))


def _sort_ids(ids):
    try:
        keyed = sorted(ids, key=lambda s: (float(s), s))
    except ValueError:
        keyed = sorted(ids)
    return keyed


def _ingest_long(rows, label):
    cells = {}
    for line, row in rows[1:]:
        if len(row) != 3:
            raise ParseError(f"line {line}: expected 3 cells, found {len(row)}", line)
        cid = row[0].strip()
        if cid == "":
            raise ParseError(f"line {line}, column 1: missing curve id", line, 1)
        x = _number(row[1], line, 2)
        v = _number(row[2], line, 3)
        if (cid, x) in cells:
            raise ParseError(f"line {line}: duplicate entry for curve {cid!r} at x={fmt(x)}", line)
        cells[(cid, x)] = v
    if not cells:
        raise ParseError("no data rows", rows[0][0])
    ids = _sort_ids({c for c, _ in cells})
    xs = sorted({x for _, x in cells})
    out = np.empty((len(ids), len(xs)))
    for i, cid in enumerate(ids):
        for j, x in enumerate(xs):
            if (cid, x) not in cells:
                raise ParseError(f"curve {cid!r} has no value at x={fmt(x)}")
            out[i, j] = cells[(cid, x)]
    return FunctionalSeries(out, Grid(xs), label, tuple(ids))


def wide_csv_text(series: FunctionalSeries, id_header: str = "t") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([id_header] + [fmt(x) for x in series.grid.points])
    for cid, row in zip(series.ids, series.values):
        w.writerow([cid] + [fmt(v) for v in row])
    return buf.getvalue()


def write_wide_csv(series: FunctionalSeries, path, id_header: str = "t") -> Path:
    path = Path(path)
    path.write_text(wide_csv_text(series, id_header))
    return path


def long_csv_text(series: FunctionalSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LONG_HEADER)
    for cid, row in zip(series.ids, series.values):
        for x, v in zip(series.grid.points, row):
            w.writerow([cid, fmt(x), fmt(v)])
    return buf.getvalue()


def write_table_csv(rows, path, columns) -> Path:
    """Write dict-like rows with a fixed column order; numbers via :func:`fmt`."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) if isinstance(r[c], (int, float, np.floating, np.integer))
                    and not isinstance(r[c], bool) else r[c] for c in columns])
    path = Path(path)
    path.write_text(buf.getvalue())
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def write_forecast_svg(path, history: FunctionalSeries, results: dict, title: str = "") -> Path:
    """Observed curves in grey, point forecast and interval bounds as lines.

    ``results`` maps a method label to a ``ForecastResult``; only horizon 1
    is drawn.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    colors = {"WLE": "tab:red", "MLE": "tab:blue"}
    x = history.grid.points
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for row in history.values:
        ax.plot(x, row, color="0.8", lw=0.6)
    for method, res in results.items():
        c = colors.get(method, "black")
        ax.plot(x, res.point[0], color=c, lw=1.6, label=f"{method} forecast")
        ax.plot(x, res.lower[0], color=c, lw=1.0, ls="--", label=f"{method} {1 - res.alpha:.0%} interval")
        ax.plot(x, res.upper[0], color=c, lw=1.0, ls="--")
    ax.set_xlabel("x")
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "ffts", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return path
