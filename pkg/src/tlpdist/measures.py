"""Core representations: discrete measures, signals, transport plans, rasters.

A signal is a pair (values, measure): a discrete probability measure on
[0,1]^d together with one m-vector of channel intensities per support point.
All types are immutable after construction and safe to share across threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

MASS_TOL = 1e-9       # probability weights must sum to 1 within this
MARGINAL_TOL = 1e-7   # default tolerance for plan marginal audits


def _frozen(a, dtype=float, ndim=None) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    if ndim is not None and a.ndim != ndim:
        raise InvalidArgumentError(f"expected {ndim}-d array, got {a.ndim}-d")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure with finite support.

    Parameters
    ----------
    points : (n, d) array
        Support points. Coordinates are expected in [0,1]^d after domain
        normalization; ``extent`` keeps the original per-axis ranges so
        distances can be rescaled to original units.
    weights : (n,) array
        Nonnegative masses summing to 1 (tolerance ``MASS_TOL``).
    extent : tuple of (lo, hi) per axis, optional
        Original coordinate ranges before normalization.
    """

    points: np.ndarray
    weights: np.ndarray
    extent: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        pts = np.atleast_2d(_frozen(self.points))
        w = _frozen(self.weights, ndim=1)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        if pts.shape[0] != w.shape[0]:
            raise InvalidArgumentError(
                f"{pts.shape[0]} points but {w.shape[0]} weights")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidArgumentError("measure needs n >= 1 points in d >= 1 dims")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("support coordinates must be finite")
        if np.any(w < 0):
            raise InvalidArgumentError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > MASS_TOL:
            raise InvalidArgumentError(
                f"weights sum to {w.sum():.12g}, expected 1 within {MASS_TOL}")

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class Signal:
    """A discrete measure paired with per-point channel values.

    ``values`` has shape (n, m). Negative and arbitrary-mass values are
    allowed; only the underlying measure is normalized.
    """

    measure: DiscreteMeasure
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        v = _frozen(v, ndim=2)
        object.__setattr__(self, "values", v)
        if v.shape[0] != self.measure.size:
            raise InvalidArgumentError(
                f"{v.shape[0]} value rows for {self.measure.size} support points")
        if v.shape[1] < 1:
            raise InvalidArgumentError("channel dimension must be >= 1")
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("channel values must be finite")

    @property
    def domain_dim(self) -> int:
        return self.measure.dim

    @property
    def channel_dim(self) -> int:
        return self.values.shape[1]

    @property
    def size(self) -> int:
        return self.measure.size

    def weighted_sum(self) -> np.ndarray:
        """Integral of the signal against its measure, per channel."""
        return self.measure.weights @ self.values


@dataclass(frozen=True)
class TransportPlan:
    """Sparse coupling between a source and a target measure.

    Entries are triplets (row index, col index, mass) with strictly positive
    mass. ``is_permutation`` marks plans with exactly one entry of mass 1/n
    per row and per column.
    """

    row: np.ndarray
    col: np.ndarray
    mass: np.ndarray
    source_size: int
    target_size: int
    is_permutation: bool = False

    def __post_init__(self):
        r = _frozen(self.row, dtype=np.intp, ndim=1)
        c = _frozen(self.col, dtype=np.intp, ndim=1)
        m = _frozen(self.mass, ndim=1)
        object.__setattr__(self, "row", r)
        object.__setattr__(self, "col", c)
        object.__setattr__(self, "mass", m)
        if not (len(r) == len(c) == len(m)):
            raise InvalidArgumentError("row/col/mass lengths differ")
        if len(m) == 0:
            raise InvalidArgumentError("plan has no entries")
        if np.any(m <= 0) or not np.all(np.isfinite(m)):
            raise InvalidArgumentError("plan masses must be positive and finite")
        if np.any(r < 0) or np.any(r >= self.source_size):
            raise InvalidArgumentError("row index out of range")
        if np.any(c < 0) or np.any(c >= self.target_size):
            raise InvalidArgumentError("col index out of range")
        if self.is_permutation:
            n = self.source_size
            if self.target_size != n or len(m) != n:
                raise InvalidArgumentError("permutation plan must be square with n entries")
            if len(np.unique(r)) != n or len(np.unique(c)) != n:
                raise InvalidArgumentError("permutation plan needs one entry per row/col")
            if np.max(np.abs(m - 1.0 / n)) > MASS_TOL:
                raise InvalidArgumentError("permutation plan entries must have mass 1/n")

    @property
    def entries(self):
        """Iterator over (i, j, mass) triplets."""
        return zip(self.row.tolist(), self.col.tolist(), self.mass.tolist())

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.source_size, self.target_size))
        np.add.at(dense, (self.row, self.col), self.mass)
        return dense

    def check_marginals(self, p: np.ndarray, q: np.ndarray, tol: float = MARGINAL_TOL):
        """Raise if row/column sums deviate from (p, q) by more than ``tol``."""
        rows, cols = marginals(self)
        dr = np.max(np.abs(rows - p))
        dc = np.max(np.abs(cols - q))
        if dr > tol or dc > tol:
            raise InvalidArgumentError(
                f"marginal residuals ({dr:.3e}, {dc:.3e}) exceed {tol:.1e}")


@dataclass(frozen=True)
class ImageRaster:
    """Row-major grid of pixel values in [0,1], 1 (gray) or 3 (RGB) channels."""

    width: int
    height: int
    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim == 1:
            px = px[:, None]
        px = _frozen(px, ndim=2)
        object.__setattr__(self, "pixels", px)
        if self.width < 1 or self.height < 1:
            raise InvalidArgumentError("image dimensions must be positive")
        if px.shape[0] != self.width * self.height:
            raise InvalidArgumentError(
                f"{px.shape[0]} pixels for {self.width}x{self.height} image")
        if px.shape[1] not in (1, 3):
            raise InvalidArgumentError("images must have 1 or 3 channels")
        if px.min() < 0.0 or px.max() > 1.0:
            raise InvalidArgumentError("pixel values must lie in [0,1]")

    @property
    def channel_dim(self) -> int:
        return self.pixels.shape[1]

    def to_signal(self) -> Signal:
        """View the raster as a signal on the uniform pixel-center measure."""
        return Signal(uniform_grid_measure(self.width, self.height), self.pixels)


def uniform_grid_measure(width: int, height: int | None = None) -> DiscreteMeasure:
    """Uniform measure at pixel centers of a 1D or 2D grid over [0,1]^d.

    With ``height=None`` returns the 1D grid of ``width`` cells at centers
    (i+0.5)/width. Otherwise support points are ((i+0.5)/width, (j+0.5)/height)
    in row-major order (x fastest, matching ImageRaster pixel layout), each
    with weight 1/(width*height).
    """
    if width < 1 or (height is not None and height < 1):
        raise InvalidArgumentError("grid dimensions must be >= 1")
    if height is None:
        pts = ((np.arange(width) + 0.5) / width)[:, None]
        w = np.full(width, 1.0 / width)
        return DiscreteMeasure(pts, w)
    xs = (np.arange(width) + 0.5) / width
    ys = (np.arange(height) + 0.5) / height
    # row-major: y (rows) outer, x (cols) inner, matching ImageRaster layout
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    w = np.full(width * height, 1.0 / (width * height))
    return DiscreteMeasure(pts, w)


def pushforward(measure: DiscreteMeasure, mapping, target_points) -> DiscreteMeasure:
    """Push a measure through an index map onto given target points.

    ``mapping[i]`` is the target index receiving the mass of source point i;
    target weights accumulate incoming source weights, so total mass is
    preserved exactly.
    """
    mapping = np.asarray(mapping, dtype=np.intp)
    target_points = np.atleast_2d(np.asarray(target_points, dtype=float))
    if mapping.shape != (measure.size,):
        raise InvalidArgumentError(
            f"map must assign every one of the {measure.size} source indices")
    nt = target_points.shape[0]
    if np.any(mapping < 0) or np.any(mapping >= nt):
        raise InvalidArgumentError("map hits an index outside the target support")
    w = np.zeros(nt)
    np.add.at(w, mapping, measure.weights)
    keep = w > 0
    return DiscreteMeasure(target_points[keep], w[keep])


def value_histogram(signal: Signal, bins: int,
                    value_range: np.ndarray | None = None) -> DiscreteMeasure:
    """Histogram of a signal's values: the pushforward of its measure.

    Bins the m-dimensional values on a regular grid of ``bins`` bins per
    channel and returns a measure over the occupied bin centers in value
    space. Masses sum to 1. ``value_range`` is an (m, 2) array of per-channel
    (lo, hi); by default the signal's own value range is used. A degenerate
    channel range collapses to a single bin centered at the value.
    """
    if bins < 1:
        raise InvalidArgumentError("bins must be >= 1")
    v = signal.values
    if value_range is None:
        value_range = np.column_stack([v.min(axis=0), v.max(axis=0)])
    else:
        value_range = np.asarray(value_range, dtype=float)
        if value_range.shape != (signal.channel_dim, 2):
            raise InvalidArgumentError("value_range must be (channels, 2)")
        if np.any(v < value_range[:, 0] - 1e-12) or np.any(v > value_range[:, 1] + 1e-12):
            raise InvalidArgumentError("values fall outside the given range")
    lo, hi = value_range[:, 0], value_range[:, 1]
    span = hi - lo
    degenerate = span <= 0
    width = np.where(degenerate, 1.0, span / bins)
    idx = np.clip(((v - lo) / width).astype(int), 0, bins - 1)
    idx[:, degenerate] = 0
    # collapse multi-channel bin indices to flat keys
    flat = np.zeros(signal.size, dtype=np.int64)
    for c in range(signal.channel_dim):
        flat = flat * bins + idx[:, c]
    uniq, inv = np.unique(flat, return_inverse=True)
    mass = np.zeros(len(uniq))
    np.add.at(mass, inv, signal.measure.weights)
    # recover per-channel indices of the occupied bins
    centers = np.empty((len(uniq), signal.channel_dim))
    rem = uniq.copy()
    for c in range(signal.channel_dim - 1, -1, -1):
        k = rem % bins
        rem //= bins
        centers[:, c] = np.where(degenerate[c], lo[c], lo[c] + (k + 0.5) * width[c])
    return DiscreteMeasure(centers, mass / mass.sum())


def marginals(plan: TransportPlan) -> tuple[np.ndarray, np.ndarray]:
    """Accumulated row and column sums of a plan, for constraint auditing."""
    rows = np.zeros(plan.source_size)
    cols = np.zeros(plan.target_size)
    np.add.at(rows, plan.row, plan.mass)
    np.add.at(cols, plan.col, plan.mass)
    return rows, cols


def normalize_domain(points: np.ndarray) -> tuple[np.ndarray, tuple[tuple[float, float], ...]]:
    """Map coordinates into [0,1]^d, returning the original per-axis extents.

    Coordinates already inside [0,1] are left untouched (extent (0,1) per
    axis) so writing and re-reading a normalized signal is stable. Otherwise
    each axis is affinely mapped from its [min, max] range onto [0,1]; a
    constant axis maps to 0.5.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.min() >= 0.0 and pts.max() <= 1.0:
        return pts, tuple((0.0, 1.0) for _ in range(pts.shape[1]))
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = hi - lo
    out = np.where(span > 0, (pts - lo) / np.where(span > 0, span, 1.0), 0.5)
    return out, tuple((float(a), float(b)) for a, b in zip(lo, hi))
