# SPDX-License-Identifier: MIT

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.spatial import cKDTree

from gensampling.errors import DegenerateInputError, DomainError, ParameterError, ShapeError
from gensampling.patterns import gen_spiral
from gensampling.weights import density, polygon_area, voronoi_weights, voronoi_weights_1d, voronoi_weights_2d


@pytest.fixture
def rng():
    return np.random.default_rng(8)


def test_three_point_weights():
    weights = voronoi_weights_1d(np.array([-0.25, 0.0, 0.25]), 0.5)
    assert_allclose(weights.mu, [0.375, 0.25, 0.375])
    assert weights.total == pytest.approx(1.0)
    assert weights.region.measure == 1.0


def test_weights_follow_input_order():
    weights = voronoi_weights_1d(np.array([0.25, -0.25, 0.0]), 0.5)
    assert_allclose(weights.mu, [0.375, 0.375, 0.25])


def test_uniform_grid_interior_weights():
    points = 0.25 * (np.arange(16) - 8)
    weights = voronoi_weights_1d(points, 2.0)
    assert_allclose(weights.mu[1:-1], 0.25)
    assert_allclose(weights.mu[[0, -1]], [0.125, 0.375])
    assert abs(weights.total - 4.0) < 1e-12


def test_single_point_gets_whole_interval():
    assert_allclose(voronoi_weights_1d(np.array([0.3]), 1.5).mu, [3.0])


def test_center_shifts_region():
    weights = voronoi_weights_1d(np.array([9.5, 10.5]), 1.0, center=10.0)
    assert_allclose(weights.mu, [1.0, 1.0])


def test_1d_errors():
    with pytest.raises(DegenerateInputError):
        voronoi_weights_1d(np.array([0.0, 0.1, 0.1]), 1.0)
    with pytest.raises(DomainError):
        voronoi_weights_1d(np.array([0.0, 1.2]), 1.0)
    with pytest.raises(ParameterError):
        voronoi_weights_1d(np.array([0.0]), 0.0)
    with pytest.raises(ShapeError):
        voronoi_weights_1d(np.array([]), 1.0)


def test_polygon_area():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    assert polygon_area(square) == 1.0
    assert polygon_area(square[::-1]) == 1.0
    assert polygon_area(square[:2]) == 0.0


def test_symmetric_square_grid():
    a, K = 0.4, 1.0
    points = np.array([[-a, -a], [a, -a], [a, a], [-a, a]])
    assert_allclose(voronoi_weights_2d(points, K).mu, K ** 2)


def test_random_cells_tile_the_square(rng):
    K = 3.0
    points = rng.uniform(-K, K, size=(50, 2))
    weights = voronoi_weights_2d(points, K)
    assert np.all(weights.mu > 0)
    assert abs(weights.total - 4 * K ** 2) < 1e-9


def test_collinear_points_fall_back_to_all_bisectors():
    points = np.array([[-0.5, 0.0], [0.0, 0.0], [0.5, 0.0], [0.75, 0.0]])
    weights = voronoi_weights_2d(points, 1.0)
    assert_allclose(weights.mu, [1.5, 1.0, 0.75, 0.75], atol=1e-12)


def test_spiral_weights_tile_the_square():
    points = gen_spiral(3, 64, 0.97 * 4)
    weights = voronoi_weights(points, 4.0)
    assert weights.mu.shape == (points.shape[0],)
    assert abs(weights.total - 64.0) < 1e-9


def test_cells_match_monte_carlo(rng):
    K = 1.0
    line = 0.5 * (np.arange(4) - 1.5)
    grid = np.stack(np.meshgrid(line, line, indexing='ij'), axis=-1).reshape(-1, 2)
    points = grid + rng.uniform(-0.1, 0.1, size=grid.shape)
    weights = voronoi_weights_2d(points, K)

    samples = rng.uniform(-K, K, size=(10 ** 6, 2))
    _, owner = cKDTree(points).query(samples)
    estimate = np.bincount(owner, minlength=points.shape[0]) / samples.shape[0] * 4 * K ** 2
    assert np.max(np.abs(weights.mu - estimate) / weights.mu) < 2e-2


def test_2d_errors():
    with pytest.raises(DegenerateInputError):
        voronoi_weights_2d(np.array([[0.0, 0.0], [0.0, 0.0], [0.5, 0.5]]), 1.0)
    with pytest.raises(DomainError):
        voronoi_weights_2d(np.array([[0.0, 1.5]]), 1.0)
    with pytest.raises(ShapeError):
        voronoi_weights_2d(np.zeros((3, 3)), 1.0)
    with pytest.raises(ShapeError):
        voronoi_weights_2d(np.zeros((1, 2)), 1.0, center=(0.0, 0.0, 0.0))


def test_uniform_grid_density():
    K, epsilon = 2.0, 0.25
    points = np.linspace(-K, K, 17)
    report = density(points, K)
    assert abs(report.delta_raw - epsilon / 2) < 1e-12
    assert report.delta_scaled == pytest.approx(epsilon / 4)
    assert report.delta_normalized == pytest.approx(epsilon / (2 * 2 * K))
    assert report.satisfies_quarter_bound


def test_density_flag_fails_for_sparse_sets():
    report = density(np.array([0.0]), 1.0)
    assert report.delta_raw == 1.0
    assert report.delta_normalized == 0.5
    assert not report.satisfies_quarter_bound


def test_single_point_density_2d():
    K = 1.5
    report = density(np.array([[0.0, 0.0]]), K)
    assert report.delta_raw == pytest.approx(K * np.sqrt(2))


@pytest.mark.parametrize('dim', [1, 2])
def test_density_matches_grid_search(rng, dim):
    K = 1.0
    count = 12 if dim == 1 else 25
    points = rng.uniform(-K, K, size=(count,) if dim == 1 else (count, 2))
    report = density(points, K)

    axis = np.linspace(-K, K, 801)
    spacing = axis[1] - axis[0]
    if dim == 1:
        search = np.max(np.min(np.abs(axis[:, None] - points[None, :]), axis=1))
    else:
        mesh = np.stack(np.meshgrid(axis, axis, indexing='ij'), axis=-1).reshape(-1, 2)
        search = np.max(cKDTree(points).query(mesh)[0])
    assert search <= report.delta_raw + 1e-12
    assert report.delta_raw - search <= spacing * np.sqrt(dim) / 2 + 1e-12


def test_density_as_dict():
    report = density(np.array([-0.5, 0.5]), 1.0)
    assert report.as_dict() == {
        "delta_raw": 0.5,
        "delta_scaled": 0.25,
        "delta_normalized": 0.25,
        "satisfies_quarter_bound": False,
    }
