# SPDX-License-Identifier: MIT

"""Voronoi weights and density of sampling sets inside Y_K = [-K, K]^d.

A 2D cell is the bounding square clipped (Sutherland-Hodgman) against the
perpendicular bisectors to its Delaunay neighbours; a Voronoi cell is the
intersection of exactly those half-planes, so the clipped polygons tile the
square.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import Delaunay, QhullError

from gensampling.errors import DegenerateInputError, DomainError, ParameterError, ShapeError

logger = logging.getLogger(__name__)

QUARTER_BOUND = 0.25


@dataclass(frozen=True, eq=False)
class BandwidthRegion:
    dim: int
    K: float
    center: np.ndarray

    @property
    def measure(self):
        return (2 * self.K) ** self.dim

    def corners(self):
        c = self.center
        if self.dim == 1:
            return np.array([c[0] - self.K, c[0] + self.K])
        return np.array([
            [c[0] - self.K, c[1] - self.K],
            [c[0] + self.K, c[1] - self.K],
            [c[0] + self.K, c[1] + self.K],
            [c[0] - self.K, c[1] + self.K],
        ])


@dataclass(frozen=True, eq=False)
class WeightSet:
    mu: np.ndarray
    region: BandwidthRegion
    cells: Optional[list] = None

    @property
    def total(self):
        return float(np.sum(self.mu))


@dataclass(frozen=True)
class DensityReport:
    delta_raw: float
    delta_scaled: float
    delta_normalized: float
    satisfies_quarter_bound: bool

    def as_dict(self):
        return {
            "delta_raw": self.delta_raw,
            "delta_scaled": self.delta_scaled,
            "delta_normalized": self.delta_normalized,
            "satisfies_quarter_bound": self.satisfies_quarter_bound,
        }


def _region(dim, K, center):
    if not K > 0:
        raise ParameterError(f"Bandwidth half-width K must be positive, got {K}")
    center = np.zeros(dim) if center is None else np.atleast_1d(np.asarray(center, dtype=float))
    if center.shape != (dim,):
        raise ShapeError(f"Region center must have {dim} coordinates, got {center.shape}")
    return BandwidthRegion(dim=dim, K=float(K), center=center)


def _check_inside(points, region):
    offset = np.abs(points - region.center)
    if np.any(offset > region.K):
        worst = np.max(offset)
        raise DomainError(f"Sampling points leave the region [-{region.K}, {region.K}]^{region.dim} (offset {worst})")


def voronoi_weights_1d(points, K, center=None):
    """Lengths of the midpoint cells, end cells clipped at the region edges.

    Weights are returned in the order of ``points``.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 1 or points.shape[0] < 1:
        raise ShapeError(f"Expected a nonempty 1D array of points, got shape {points.shape}")
    region = _region(1, K, center)
    _check_inside(points, region)

    order = np.argsort(points, kind='stable')
    ordered = points[order]
    if np.any(np.diff(ordered) == 0):
        raise DegenerateInputError("Duplicate sampling points have zero-length Voronoi cells")
    lower, upper = region.corners()
    edges = np.concatenate(([lower], (ordered[1:] + ordered[:-1]) / 2, [upper]))
    mu = np.empty_like(points)
    mu[order] = np.diff(edges)
    return WeightSet(mu=mu, region=region)


def _clip(polygon, normal, offset):
    """Part of a convex polygon with normal . x <= offset (Sutherland-Hodgman)."""
    side = polygon @ normal - offset
    inside = side <= 0
    if inside.all():
        return polygon
    if not inside.any():
        return polygon[:0]
    clipped = []
    count = len(polygon)
    for i in range(count):
        j = (i + 1) % count
        if inside[i]:
            clipped.append(polygon[i])
        if inside[i] != inside[j]:
            t = side[i] / (side[i] - side[j])
            clipped.append(polygon[i] + t * (polygon[j] - polygon[i]))
    return np.array(clipped)


def polygon_area(polygon):
    """Shoelace area of a simple polygon given as an (n, 2) vertex array."""
    if len(polygon) < 3:
        return 0.0
    x, y = polygon[:, 0], polygon[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _neighbours(points):
    """Delaunay neighbour lists; every other point when triangulation is degenerate."""
    count = points.shape[0]
    everyone = [np.delete(np.arange(count), i) for i in range(count)]
    if count < 4:
        return everyone
    try:
        triangulation = Delaunay(points)
    except QhullError:
        logger.debug("Delaunay triangulation failed, clipping against all bisectors")
        return everyone
    indptr, indices = triangulation.vertex_neighbor_vertices
    neighbours = [indices[indptr[i]:indptr[i + 1]] for i in range(count)]
    # coplanar points are left out of the triangulation
    if len(triangulation.coplanar):
        return everyone
    return neighbours


def voronoi_cells_2d(points, region):
    cells = []
    square = region.corners()
    for i, neighbours in enumerate(_neighbours(points)):
        cell = square
        for j in neighbours:
            normal = points[j] - points[i]
            offset = normal @ (points[i] + points[j]) / 2
            cell = _clip(cell, normal, offset)
            if len(cell) == 0:
                break
        cells.append(cell)
    return cells


def voronoi_weights_2d(points, K, center=None):
    """Areas of the Voronoi cells clipped to the square [-K, K]^2."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 1:
        raise ShapeError(f"Expected an (M, 2) array of points, got shape {points.shape}")
    region = _region(2, K, center)
    _check_inside(points, region)
    if np.unique(points, axis=0).shape[0] != points.shape[0]:
        raise DegenerateInputError("Duplicate sampling points have zero-area Voronoi cells")

    cells = voronoi_cells_2d(points, region)
    mu = np.array([polygon_area(cell) for cell in cells])
    logger.debug(f"Computed {len(cells)} Voronoi cells, total area {mu.sum()}")
    return WeightSet(mu=mu, region=region, cells=cells)


def voronoi_weights(points, K, center=None):
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        return voronoi_weights_1d(points, K, center)
    return voronoi_weights_2d(points, K, center)


def density(points, K, center=None, weight_set=None):
    """Largest distance from a point of Y_K to its nearest sample.

    The maximum sits at a cell vertex: an interval edge or midpoint in 1D,
    a vertex of a clipped Voronoi cell (region corners included) in 2D.
    """
    points = np.asarray(points, dtype=float)
    if weight_set is None:
        weight_set = voronoi_weights(points, K, center)
    region = weight_set.region
    if points.ndim == 1:
        ordered = np.sort(points)
        lower, upper = region.corners()
        candidates = [ordered[0] - lower, upper - ordered[-1]]
        if ordered.shape[0] > 1:
            candidates.append(np.max(np.diff(ordered)) / 2)
        delta_raw = float(max(candidates))
    else:
        delta_raw = 0.0
        for generator, cell in zip(points, weight_set.cells):
            if len(cell):
                delta_raw = max(delta_raw, float(np.max(np.linalg.norm(cell - generator, axis=1))))

    delta_normalized = delta_raw / (2 * region.K)
    return DensityReport(
        delta_raw=delta_raw,
        delta_scaled=delta_raw / 2,
        delta_normalized=delta_normalized,
        satisfies_quarter_bound=bool(delta_normalized < QUARTER_BOUND),
    )
