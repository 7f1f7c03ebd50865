"""Multi-index enumeration and geometric moments of point distributions.

Moments of order ``p`` of a weighted point set are the sums
``m_P = sum_i w_i * prod_j x_ij^P_j`` over all exponent vectors ``P`` with
``sum(P) = p``.  Central moments are the same sums after translating the
set so its gravity center sits at the origin.

All containers here are immutable after construction (numpy buffers are
marked read-only), so they are safe to share across threads; moment
accumulation is a pure reduction over points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegenerateInputError

__all__ = [
    "MultiIndex",
    "PointCloud",
    "DensityImage",
    "MomentVector",
    "enumerate_multi_indices",
    "multi_index_count",
    "compute_raw_moments",
    "compute_central_moments",
    "gravity_center",
    "center_cloud",
    "normalize_scale",
    "image_to_cloud",
]


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Exponent vector identifying one moment ``m_{P_1...P_n}``."""

    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.exponents) < 2:
            raise ValueError(f"dimension must be >= 2, got {len(self.exponents)}")
        if any(e < 0 or not isinstance(e, int) for e in self.exponents):
            raise ValueError(f"exponents must be non-negative integers: {self.exponents}")

    @property
    def dimension(self) -> int:
        return len(self.exponents)

    @property
    def order(self) -> int:
        return sum(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __getitem__(self, i: int) -> int:
        return self.exponents[i]

    def __len__(self) -> int:
        return len(self.exponents)

    def __str__(self) -> str:
        if all(e <= 9 for e in self.exponents):
            return "m" + "".join(str(e) for e in self.exponents)
        return "m(" + ",".join(str(e) for e in self.exponents) + ")"


def multi_index_count(n: int, p: int) -> int:
    """Number of multi-indices of order ``p`` in dimension ``n``."""
    return math.comb(p + n - 1, n - 1)


@lru_cache(maxsize=None)
def enumerate_multi_indices(n: int, p: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of order ``p`` in dimension ``n``, canonically ordered.

    The canonical order is graded reverse-lexicographic, descending: within a
    fixed order the index whose trailing exponents are smallest comes first
    (so in 3-D, order 3 starts ``m300, m210, m120, m030, m201, ...`` and ends
    ``m003``).  The order is total and deterministic; every matrix and
    coefficient file downstream depends on it.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if p < 0:
        raise ValueError(f"order must be >= 0, got {p}")

    def compositions(total: int, parts: int):
        if parts == 1:
            yield (total,)
            return
        for head in range(total + 1):
            for tail in compositions(total - head, parts - 1):
                yield (head,) + tail

    # Sorting ascending by the reversed exponent tuple realizes descending
    # grevlex on the original tuples.
    ordered = sorted(compositions(p, n), key=lambda e: tuple(reversed(e)))
    return tuple(MultiIndex(e) for e in ordered)


@lru_cache(maxsize=None)
def _index_positions(n: int, p: int) -> dict[tuple[int, ...], int]:
    return {idx.exponents: k for k, idx in enumerate(enumerate_multi_indices(n, p))}


def index_position(n: int, p: int, exponents: tuple[int, ...]) -> int:
    """Position of an exponent vector in the canonical order of its (n, p) family."""
    return _index_positions(n, p)[tuple(exponents)]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PointCloud:
    """A weighted set of n-dimensional points (the discrete density f)."""

    dimension: int
    points: np.ndarray  # (N, n)
    weights: np.ndarray  # (N,)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise ValueError(
                f"points must have shape (N, {self.dimension}), got {pts.shape}"
            )
        if pts.shape[0] == 0:
            raise ValueError("point cloud must contain at least one point")
        if self.dimension < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dimension}")
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (pts.shape[0],):
            raise ValueError(f"weights must have shape ({pts.shape[0]},), got {w.shape}")
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(w)):
            raise ValueError("points and weights must be finite")
        if np.any(w <= 0.0):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "points", _freeze(pts))
        object.__setattr__(self, "weights", _freeze(w))

    @classmethod
    def from_points(cls, points, weights=None) -> "PointCloud":
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        w = np.ones(pts.shape[0]) if weights is None else np.asarray(weights, dtype=np.float64)
        return cls(dimension=pts.shape[1], points=pts, weights=w)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def translated(self, offset) -> "PointCloud":
        off = np.asarray(offset, dtype=np.float64).reshape(1, self.dimension)
        return PointCloud(self.dimension, self.points + off, self.weights)

    def transformed(self, matrix) -> "PointCloud":
        m = np.asarray(matrix, dtype=np.float64)
        if m.shape != (self.dimension, self.dimension):
            raise ValueError(f"matrix must be {self.dimension}x{self.dimension}")
        return PointCloud(self.dimension, self.points @ m.T, self.weights)

    def rms_radius(self) -> float:
        r2 = np.sum(self.points**2, axis=1)
        return float(np.sqrt(np.sum(self.weights * r2) / self.total_weight))


@dataclass(frozen=True)
class DensityImage:
    """A gray-level raster with values in [0, 1], row-major."""

    width: int
    height: int
    pixels: np.ndarray  # (height, width)

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels, dtype=np.float64).reshape(self.height, self.width)
        if px.size == 0:
            raise ValueError("image must not be empty")
        if np.min(px) < 0.0 or np.max(px) > 1.0:
            raise ValueError("pixel values must lie in [0, 1]")
        object.__setattr__(self, "pixels", _freeze(px))


@dataclass(frozen=True)
class MomentVector:
    """All moments of one order, stored in canonical multi-index order."""

    dimension: int
    order: int
    values: np.ndarray
    indices: tuple[MultiIndex, ...] = field(repr=False, default=())

    def __post_init__(self) -> None:
        idx = enumerate_multi_indices(self.dimension, self.order)
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (len(idx),):
            raise ValueError(
                f"expected {len(idx)} values for dimension {self.dimension} "
                f"order {self.order}, got shape {vals.shape}"
            )
        object.__setattr__(self, "values", _freeze(vals))
        object.__setattr__(self, "indices", idx)

    def value(self, exponents) -> float:
        return float(self.values[index_position(self.dimension, self.order, tuple(exponents))])

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {idx.exponents: float(v) for idx, v in zip(self.indices, self.values)}


def compute_raw_moments(cloud: PointCloud, p: int) -> MomentVector:
    """Raw moments of order ``p``: ``m_P = sum_i w_i prod_j x_ij^P_j``.

    Summation over points uses numpy's pairwise reduction, which keeps
    accumulation error in check for the wide magnitude ranges produced by
    high-order monomials.
    """
    if p < 0:
        raise ValueError(f"order must be >= 0, got {p}")
    n = cloud.dimension
    indices = enumerate_multi_indices(n, p)
    # Precompute coordinate powers once; each moment is then a product of
    # column slices and a weighted pairwise sum.
    powers = [
        np.vander(cloud.points[:, j], N=p + 1, increasing=True) for j in range(n)
    ]
    values = np.empty(len(indices))
    for k, idx in enumerate(indices):
        mono = cloud.weights.copy()
        for j, e in enumerate(idx.exponents):
            if e:
                mono *= powers[j][:, e]
        values[k] = np.sum(mono)
    return MomentVector(n, p, values)


def gravity_center(cloud: PointCloud) -> np.ndarray:
    """Weighted mean of the points (ratio of first-order to zeroth-order moments)."""
    total = cloud.total_weight
    if total <= 0.0:
        raise DegenerateInputError("total weight must be positive")
    return np.asarray(cloud.weights @ cloud.points / total)


def center_cloud(cloud: PointCloud) -> tuple[PointCloud, np.ndarray]:
    """Translate the cloud so its gravity center is the origin; returns (cloud, center)."""
    c = gravity_center(cloud)
    return cloud.translated(-c), c


def compute_central_moments(cloud: PointCloud, p: int) -> MomentVector:
    """Moments of order ``p`` about the gravity center (translation invariant)."""
    centered, _ = center_cloud(cloud)
    return compute_raw_moments(centered, p)


def normalize_scale(cloud: PointCloud) -> tuple[PointCloud, float]:
    """Rescale a centered cloud to unit RMS radius; returns (cloud, scale).

    Pure numerical conditioning: directions of all downstream singular
    vectors, and hence every classification, are unchanged by this step.
    """
    c = gravity_center(cloud)
    s = cloud.rms_radius()
    if s <= 0.0:
        raise DegenerateInputError("all points coincide with the origin; no scale")
    if np.linalg.norm(c) > 1e-6 * s:
        raise ValueError("normalize_scale expects a centered cloud")
    scaled = PointCloud(cloud.dimension, cloud.points / s, cloud.weights)
    return scaled, s


def image_to_cloud(image: DensityImage, threshold: float = 0.5) -> PointCloud:
    """Binarize an image and return one unit-weight 2-D point per lit pixel.

    Pixel centers are used: pixel (row, col) maps to (col + 0.5, row + 0.5),
    which makes analytic moment formulas exact in the continuum limit.
    Weight is fixed at 1 per selected pixel.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    rows, cols = np.nonzero(image.pixels >= threshold)
    if rows.size == 0:
        raise DegenerateInputError("no pixel passes the threshold")
    pts = np.column_stack([cols + 0.5, rows + 0.5])
    return PointCloud(2, pts, np.ones(rows.size))
