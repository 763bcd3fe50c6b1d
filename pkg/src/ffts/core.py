"""Domain types, grid quadrature and seeded random streams."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError, GridMismatchError, InvalidDataError


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing evaluation points shared by every curve."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).ravel()
        if pts.size < 2:
            raise DataError("a grid needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise InvalidDataError("grid points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise DataError("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_weights", _trapezoid_weights(pts))

    def __len__(self):
        return self.points.size

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(
            np.all(self.points == other.points)
        )

    def __hash__(self):
        return hash(self.points.tobytes())

    @property
    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights; they sum to the domain length."""
        return self._weights

    @property
    def length(self) -> float:
        return float(self.points[-1] - self.points[0])

    @property
    def mean_step(self) -> float:
        return self.length / (self.points.size - 1)

    @classmethod
    def linspace(cls, start, stop, num):
        return cls(np.linspace(start, stop, num))

    @classmethod
    def integers(cls, num, start=1):
        return cls(np.arange(start, start + num, dtype=float))


def _trapezoid_weights(points):
    dx = np.diff(points)
    w = np.zeros_like(points)
    w[:-1] += dx / 2
    w[1:] += dx / 2
    w.setflags(write=False)
    return w


@dataclass(frozen=True, eq=False)
class FunctionalSeries:
    """An ``N x J`` matrix of curve values on a common :class:`Grid`."""

    values: np.ndarray
    grid: Grid
    label: str = ""
    curve_ids: tuple | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[None, :]
        if vals.ndim != 2 or vals.shape[0] < 1:
            raise DataError("values must be a non-empty N x J matrix")
        if vals.shape[1] != len(self.grid):
            raise GridMismatchError(
                f"values have {vals.shape[1]} columns but the grid has {len(self.grid)} points"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidDataError("functional series contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.curve_ids is not None:
            ids = tuple(str(i) for i in self.curve_ids)
            if len(ids) != vals.shape[0]:
                raise DataError(f"{len(ids)} curve ids for {vals.shape[0]} curves")
            object.__setattr__(self, "curve_ids", ids)

    @property
    def ids(self) -> tuple:
        """Curve identifiers; defaults to ``1..N``."""
        if self.curve_ids is None:
            return tuple(str(i) for i in range(1, self.n_curves + 1))
        return self.curve_ids

    @property
    def n_curves(self) -> int:
        return self.values.shape[0]

    @property
    def n_points(self) -> int:
        return self.values.shape[1]

    def head(self, n: int) -> "FunctionalSeries":
        """First ``n`` curves, e.g. a training block."""
        ids = None if self.curve_ids is None else self.curve_ids[:n]
        return FunctionalSeries(self.values[:n], self.grid, self.label, ids)

    def with_values(self, values, label=None) -> "FunctionalSeries":
        """Same grid and ids, new values (shape must keep ``N``)."""
        vals = np.asarray(values)
        ids = self.curve_ids if vals.ndim == 2 and vals.shape[0] == self.n_curves else None
        return FunctionalSeries(values, self.grid, self.label if label is None else label, ids)


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream addressed by ``(seed, stream_id)``.

    Streams with different ids are statistically independent, so parallel
    tasks each derive their own id instead of sharing one generator.
    """

    seed: int
    stream_id: int = 0
    _path: tuple = field(default=(), repr=False)

    def _seed_sequence(self):
        key = (self.stream_id & 0xFFFFFFFFFFFFFFFF,) + self._path
        return np.random.SeedSequence(self.seed & 0xFFFFFFFFFFFFFFFF, spawn_key=key)

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.PCG64(self._seed_sequence()))

    def substream(self, index: int) -> "RngStream":
        """Child stream ``index``; children never overlap their parent."""
        return RngStream(self.seed, self.stream_id, self._path + (int(index),))


def _curve_array(curve, grid):
    if isinstance(curve, FunctionalSeries):
        if curve.grid != grid:
            raise GridMismatchError("curve lives on a different grid")
        curve = curve.values
    arr = np.asarray(curve, dtype=float)
    if arr.shape[-1] != len(grid):
        raise GridMismatchError(
            f"curve has {arr.shape[-1]} points but the grid has {len(grid)}"
        )
    return arr


def inner_product(f, g, grid: Grid) -> float | np.ndarray:
    """Trapezoidal approximation of the L2 inner product of two curves.

    Either argument may be a stack of curves (last axis on the grid), in which
    case the products are broadcast and an array is returned.
    """
    fa = _curve_array(f, grid)
    ga = _curve_array(g, grid)
    out = np.sum(fa * ga * grid.weights, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def norm(f, grid: Grid) -> float | np.ndarray:
    return np.sqrt(inner_product(f, f, grid))


def center(series: FunctionalSeries) -> tuple[np.ndarray, FunctionalSeries]:
    """Columnwise mean curve and the mean-removed series."""
    mean = series.values.mean(axis=0)
    return mean, series.with_values(series.values - mean)
