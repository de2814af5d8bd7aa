# SPDX-License-Identifier: MIT

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gensampling.errors import DomainError, ShapeError
from gensampling.operator import apply_adjoint, apply_forward, densify, freq2wave, is_uniform_pattern
from gensampling.patterns import gen_grid, gen_jitter
from gensampling.wavelet_fourier import fourier_boundary, fourier_scaling, fourier_scaling_dilated


@pytest.fixture
def rng():
    return np.random.default_rng(31)


def _complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _relative(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def _pairing(op, rng):
    x = _complex(rng, op.coefficient_shape)
    y = _complex(rng, op.M)
    lhs = np.vdot(y, apply_forward(op, x))
    rhs = np.vdot(apply_adjoint(op, y), x)
    return abs(lhs - rhs) / (np.linalg.norm(x) * np.linalg.norm(y))


def test_haar_uniform_operator_entries():
    points = gen_grid(16, 0.5)
    op = freq2wave(points, 'haar', 3)
    assert op.shape == (16, 8)
    assert op.p == 0
    assert op.uniform
    matrix = densify(op)
    k = np.arange(8) - 4
    expected = 2 ** -1.5 * fourier_scaling('haar', points / 8)[:, None] * np.exp(-2j * np.pi * np.outer(points / 8, k))
    assert_allclose(matrix, expected, atol=1e-14)


def test_scale_too_small():
    with pytest.raises(DomainError):
        freq2wave(gen_grid(16, 0.5), 'db2', 1)
    with pytest.raises(DomainError):
        freq2wave(gen_grid(16, 0.5), 'db4', 2)
    with pytest.raises(DomainError):
        freq2wave(gen_grid(16, 0.5), 'haar', 0)


def test_bandwidth_exceeded():
    with pytest.raises(DomainError):
        freq2wave(np.array([0.0, 4.0]), 'db2', 3)
    with pytest.raises(DomainError):
        freq2wave(np.array([[0.0, 0.0], [1.0, -4.5]]), 'haar', 3)
    with pytest.raises(DomainError):
        freq2wave(np.array([0.0, 3.0]), 'db2', 3, bandwidth=2.5)
    op = freq2wave(np.array([-4.0, 3.9]), 'db2', 3)
    assert op.M == 2


def test_alias_folds_out_of_band_points(rng):
    points = np.array([-1.0, 2.5, 4.0, 6.5, -9.0])
    op = freq2wave(points, 'db2', 3, alias=True, uniform_fast_path=False)
    x = _complex(rng, 8)
    assert _relative(apply_forward(op, x), densify(op) @ x) < 1e-6


def test_bad_shapes():
    with pytest.raises(ShapeError):
        freq2wave(np.zeros((4, 3)), 'db2', 3)
    with pytest.raises(ShapeError):
        freq2wave(np.array([0.0, 1.0]), 'db2', 3, weights=np.ones(3))
    op = freq2wave(gen_grid(16, 0.5), 'db2', 3)
    with pytest.raises(ShapeError):
        apply_forward(op, np.zeros(7))
    with pytest.raises(ShapeError):
        apply_adjoint(op, np.zeros(15))


def test_zero_coefficients_give_zero_samples():
    op = freq2wave(gen_jitter(40, 0.5, 0.1, seed=2), 'db3', 5)
    assert np.all(apply_forward(op, np.zeros(32)) == 0)
    assert np.all(apply_adjoint(op, np.zeros(40)) == 0)


def test_single_frequency_row_haar():
    op = freq2wave(np.array([0.0]), 'haar', 2)
    assert_allclose(densify(op), np.full((1, 4), 0.5), atol=1e-15)


def test_single_frequency_row_db2():
    xi = 1.3
    J, N = 3, 8
    row = densify(freq2wave(np.array([xi]), 'db2', J))[0]
    assert row.shape == (N,)
    scaled = xi / N
    left = 2 ** (-J / 2) * np.exp(1j * np.pi * xi) * fourier_boundary('db2', 'left', scaled)
    right = 2 ** (-J / 2) * np.exp(-1j * np.pi * xi) * fourier_boundary('db2', 'right', scaled)
    assert_allclose(row[:2], left, atol=1e-14)
    assert_allclose(row[-2:], right[::-1], atol=1e-14)
    for n in range(2, 6):
        assert_allclose(row[n], fourier_scaling_dilated('db2', J, n - N // 2, xi), atol=1e-14)


def test_single_frequency_row_2d_is_tensor_of_1d_rows():
    xi = np.array([[1.3, -2.1]])
    row = densify(freq2wave(xi, 'db2', 3))[0]
    rx = densify(freq2wave(xi[:, 0], 'db2', 3))[0]
    ry = densify(freq2wave(xi[:, 1], 'db2', 3))[0]
    # column-stacked: entry ix + N * iy
    assert_allclose(row, np.outer(ry, rx).ravel(), atol=1e-14)


def test_forward_matches_dense_haar_uniform(rng):
    op = freq2wave(gen_grid(16, 0.5), 'haar', 3)
    x = _complex(rng, 8)
    assert _relative(apply_forward(op, x), densify(op) @ x) < 1e-10
    y = _complex(rng, 16)
    assert _relative(apply_adjoint(op, y), densify(op).conj().T @ y) < 1e-10


def test_forward_matches_dense_db4_jitter(rng):
    op = freq2wave(gen_jitter(64, 0.2, 0.05, seed=4), 'db4', 4)
    assert not op.uniform
    x = _complex(rng, 16)
    assert _relative(apply_forward(op, x), densify(op) @ x) < 1e-6
    y = _complex(rng, 64)
    assert _relative(apply_adjoint(op, y), densify(op).conj().T @ y) < 1e-6


def test_uniform_fast_path_matches_nfft_path(rng):
    points = gen_grid(64, 0.5)
    fast = freq2wave(points, 'db4', 5)
    slow = freq2wave(points, 'db4', 5, uniform_fast_path=False)
    assert fast.uniform and not slow.uniform
    x = _complex(rng, 32)
    assert _relative(apply_forward(fast, x), apply_forward(slow, x)) < 1e-7


def test_forward_matches_dense_2d(rng):
    points = rng.uniform(-3.9, 3.9, size=(20, 2))
    op = freq2wave(points, 'db2', 3)
    assert op.shape == (20, 64)
    matrix = densify(op)
    X = _complex(rng, (8, 8))
    assert _relative(apply_forward(op, X), matrix @ X.ravel(order='F')) < 1e-6
    assert_allclose(apply_forward(op, X.ravel(order='F')), apply_forward(op, X))
    y = _complex(rng, 20)
    assert _relative(apply_adjoint(op, y).ravel(order='F'), matrix.conj().T @ y) < 1e-6


def test_weighted_2d_matches_dense(rng):
    points = rng.uniform(-3.9, 3.9, size=(30, 2))
    weights = rng.uniform(0.1, 2.0, size=30)
    op = freq2wave(points, 'db2', 3, weights=weights)
    unweighted = densify(freq2wave(points, 'db2', 3))
    assert_allclose(densify(op), np.sqrt(weights)[:, None] * unweighted, atol=1e-14)
    X = _complex(rng, (8, 8))
    assert _relative(apply_forward(op, X), densify(op) @ X.ravel(order='F')) < 1e-6


def test_tensor_grid_matches_dense(rng):
    points = gen_grid(16, 0.5, dim=2)
    op = freq2wave(points, 'db2', 3)
    assert op.tensor_grid
    assert op.shape == (256, 64)
    matrix = densify(op)
    X = _complex(rng, (8, 8))
    assert _relative(apply_forward(op, X), matrix @ X.ravel(order='F')) < 1e-10
    y = _complex(rng, 256)
    assert _relative(apply_adjoint(op, y).ravel(order='F'), matrix.conj().T @ y) < 1e-10

    generic = freq2wave(points, 'db2', 3, uniform_fast_path=False)
    assert not generic.tensor_grid
    assert _relative(apply_forward(generic, X), apply_forward(op, X)) < 1e-6


def test_weighted_tensor_grid(rng):
    points = gen_grid(16, 0.5, dim=2)
    weights = rng.uniform(0.5, 1.5, size=256)
    op = freq2wave(points, 'db3', 3, weights=weights)
    assert op.tensor_grid
    plain = densify(freq2wave(points, 'db3', 3))
    assert_allclose(densify(op), np.sqrt(weights)[:, None] * plain, atol=1e-14)
    assert _pairing(op, rng) < 1e-10


@pytest.mark.parametrize('family', ['haar', 'db2', 'db4'])
def test_adjoint_pairing_1d(rng, family):
    op = freq2wave(gen_jitter(160, 0.375, 0.09, seed=5), family, 6)
    worst = max(_pairing(op, rng) for _ in range(100))
    assert worst < 1e-7


@pytest.mark.parametrize('family', ['haar', 'db2', 'db4'])
def test_adjoint_pairing_2d(rng, family):
    points = rng.uniform(-7.9, 7.9, size=(300, 2))
    op = freq2wave(points, family, 4)
    worst = max(_pairing(op, rng) for _ in range(100))
    assert worst < 1e-7


def test_matmul_and_linear_operator(rng):
    points = rng.uniform(-3.9, 3.9, size=(25, 2))
    op = freq2wave(points, 'db2', 3)
    X = _complex(rng, (8, 8))
    assert_allclose(op @ X, apply_forward(op, X))
    linear = op.as_linear_operator()
    assert linear.shape == (25, 64)
    v = X.ravel(order='F')
    assert_allclose(linear.matvec(v), apply_forward(op, X))
    y = _complex(rng, 25)
    assert_allclose(linear.rmatvec(y), apply_adjoint(op, y).ravel(order='F'))


def test_densify_cap():
    op = freq2wave(gen_grid(64, 0.5), 'db2', 5)
    with pytest.raises(DomainError):
        densify(op, cap=64 * 32 - 1)
    assert densify(op, cap=64 * 32).shape == (64, 32)


def test_is_uniform_pattern():
    assert is_uniform_pattern(gen_grid(32, 0.5))
    assert is_uniform_pattern(gen_grid(8, 0.25, dim=2))
    assert not is_uniform_pattern(gen_jitter(32, 0.5, 0.1, seed=1))
    assert not is_uniform_pattern(gen_jitter(8, 0.5, 0.1, seed=1, dim=2))
