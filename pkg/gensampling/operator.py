# SPDX-License-Identifier: MIT

"""The implicit change-of-basis operator from V_J^int coefficients to Fourier samples.

Columns of the M x N operator (N = 2^J) are ordered left boundary functions
(p of them), interior translates k = n - N/2 for 0-based column n, then the
right boundary functions with the one nearest the edge last. The interior
block is applied with a transform of length N whose boundary slots are
zeroed; the boundary blocks are dense M x p matrices.

In 2D the coefficients form an N x N array ``X[ix, iy]``; flattened vectors
are column-stacked (``X.ravel(order='F')``), and a tensor sampling grid lists
its points with the x index running fastest.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator

from gensampling import nufft
from gensampling.errors import DomainError, ShapeError
from gensampling.solver import solve_least_squares
from gensampling.wavelet_fourier import (DEFAULT_DEPTH, DEFAULT_TERMS, ScalingFamily, fourier_boundary, fourier_scaling,
                                         get_family)

logger = logging.getLogger(__name__)

DEFAULT_DENSIFY_CAP = 2 ** 24


@dataclass(frozen=True, eq=False)
class _Axis:
    """Per-axis factors: diagonal D, boundary blocks L and R, interior transform."""
    N: int
    p: int
    D: np.ndarray
    L: np.ndarray
    R: np.ndarray
    scaled: np.ndarray
    plan: Optional[nufft.NfftPlan]
    epsilon: Optional[float]

    @property
    def M(self):
        return self.D.shape[0]

    def interior(self, x):
        x = np.array(x, dtype=complex)
        if self.p:
            x[:self.p] = 0
            x[self.N - self.p:] = 0
        return x

    def transform(self, x):
        if self.epsilon is not None:
            return nufft.uniform_ndft_fft(x, self.M, self.epsilon, self.N)
        if x.ndim == 1:
            return nufft.nfft_forward(self.plan, x)
        return np.stack([nufft.nfft_forward(self.plan, column) for column in x.T], axis=1)

    def transform_adjoint(self, y):
        if self.epsilon is not None:
            return nufft.uniform_ndft_fft_adjoint(y, self.N, self.epsilon, self.N)
        if y.ndim == 1:
            return nufft.nfft_adjoint(self.plan, y)
        return np.stack([nufft.nfft_adjoint(self.plan, column) for column in y.T], axis=1)

    def _broadcast(self, vector, like):
        return vector.reshape((-1,) + (1,) * (like.ndim - 1))

    def forward(self, x):
        y = self.transform(self.interior(x))
        y *= self._broadcast(self.D, y)
        if self.p:
            y += self.L @ x[:self.p] + self.R @ x[self.N - self.p:]
        return y

    def adjoint(self, y):
        z = self.interior(self.transform_adjoint(self._broadcast(self.D.conj(), y) * y))
        if self.p:
            z[:self.p] += self.L.conj().T @ y
            z[self.N - self.p:] += self.R.conj().T @ y
        return z

    def dense(self):
        matrix = self.D[:, None] * np.exp(-2j * np.pi * np.outer(self.scaled, nufft.frequencies(self.N)))
        if self.p:
            matrix[:, :self.p] = self.L
            matrix[:, self.N - self.p:] = self.R
        return matrix


@dataclass(frozen=True, eq=False)
class Freq2WaveOp:
    """Change-of-basis operator; behaves like an M x N (or M x N^2) matrix.

    ``axes`` hold the per-axis factors. Row weights sqrt(mu_m) are folded into
    the x-axis factors, except on a tensor grid where the axes live on the
    grid lines and ``row_weights`` scales the flattened result instead.
    """
    dim: int
    family: ScalingFamily
    J: int
    points: np.ndarray
    weights: Optional[np.ndarray]
    alias: bool
    axes: tuple
    plan: Optional[nufft.NfftPlan]
    tensor_grid: bool
    row_weights: Optional[np.ndarray]
    densify_cap: int

    @property
    def N(self):
        return 2 ** self.J

    @property
    def M(self):
        return self.points.shape[0]

    @property
    def p(self):
        return self.axes[0].p

    @property
    def shape(self):
        return (self.M, self.N ** self.dim)

    @property
    def coefficient_shape(self):
        return (self.N,) * self.dim

    @property
    def uniform(self):
        return all(axis.epsilon is not None for axis in self.axes)

    @property
    def weighted(self):
        return self.weights is not None

    def forward(self, coeffs):
        return apply_forward(self, coeffs)

    def adjoint(self, samples):
        return apply_adjoint(self, samples)

    rmatvec = adjoint

    def __matmul__(self, coeffs):
        return apply_forward(self, coeffs)

    def weigh(self, samples):
        """Scale raw data by sqrt(mu_m) the way the operator rows are scaled."""
        samples = np.asarray(samples, dtype=complex)
        if self.weights is None:
            return samples
        return samples * np.sqrt(self.weights)

    def solve(self, samples, options=None):
        return solve_least_squares(self, samples, options)

    def as_linear_operator(self):
        """scipy LinearOperator on column-stacked coefficient vectors."""
        return LinearOperator(
            shape=self.shape,
            dtype=complex,
            matvec=lambda v: apply_forward(self, np.ravel(v)),
            rmatvec=lambda v: apply_adjoint(self, np.ravel(v)).ravel(order='F'),
        )


def _axis_factors(family, J, points, terms, depth):
    """D, L and R of one axis at natural frequencies ``points``."""
    N = 2 ** J
    scaled = points / N
    amplitude = 2 ** (-J / 2)
    D = amplitude * fourier_scaling(family, scaled, terms)
    if family.p == 1:
        empty = np.zeros((points.shape[0], 0), dtype=complex)
        return D, empty, empty
    left = fourier_boundary(family, 'left', scaled, depth, terms)
    right = fourier_boundary(family, 'right', scaled, depth, terms)
    L = amplitude * np.exp(1j * np.pi * points)[:, None] * left
    # column N-p+j holds the right function of index p-1-j
    R = amplitude * np.exp(-1j * np.pi * points)[:, None] * right[:, ::-1]
    return D, L, R


def _fold(scaled):
    return np.mod(scaled + 0.5, 1.0) - 0.5


def _make_axis(family, J, points, row_scale, alias, sigma, w, kernel, terms, depth, epsilon):
    N = 2 ** J
    D, L, R = _axis_factors(family, J, points, terms, depth)
    if row_scale is not None:
        D = D * row_scale
        L = L * row_scale[:, None]
        R = R * row_scale[:, None]
    scaled = points / N
    plan = None
    if epsilon is None:
        plan = nufft.plan_nfft(1, N, _fold(scaled) if alias else scaled, sigma, w, kernel)
    p = family.p if family.p > 1 else 0
    return _Axis(N=N, p=p, D=D, L=L, R=R, scaled=scaled, plan=plan, epsilon=epsilon)


def _tensor_lines(points):
    """Grid lines (g, g) if points are the tensor grid of g with x fastest."""
    M = points.shape[0]
    side = math.isqrt(M)
    if side * side != M or side < 2:
        return None
    line = points[:side, 0]
    expected = np.stack([np.tile(line, side), np.repeat(line, side)], axis=1)
    if np.max(np.abs(points - expected)) > nufft.UNIFORM_TOLERANCE * max(1.0, np.max(np.abs(line))):
        return None
    return line


def is_uniform_pattern(points):
    """True for the uniform grid epsilon(m-1-M/2), or its tensor grid in 2D."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        return nufft.detect_uniform(points) is not None
    line = _tensor_lines(points)
    return line is not None and nufft.detect_uniform(line) is not None


def freq2wave(samples, family, J, bandwidth=None, weights=None, alias=False, uniform_fast_path=True,
              sigma=nufft.DEFAULT_SIGMA, w=nufft.DEFAULT_HALF_WIDTH, kernel=nufft.DEFAULT_KERNEL,
              terms=DEFAULT_TERMS, depth=DEFAULT_DEPTH, densify_cap=DEFAULT_DENSIFY_CAP):
    """Build the change-of-basis operator for sampling frequencies ``samples``.

    ``samples`` has shape (M,) in 1D or (M, 2) in 2D, in natural units.
    ``weights`` are the Voronoi weights mu_m; rows are scaled by sqrt(mu_m).
    With ``alias`` the scaled points are folded into [-1/2, 1/2) instead of
    rejected; the Fourier factors still use the true frequencies.
    """
    family = get_family(family)
    points = np.asarray(samples, dtype=float)
    if points.ndim not in (1, 2) or (points.ndim == 2 and points.shape[1] != 2):
        raise ShapeError(f"Sampling frequencies must have shape (M,) or (M, 2), got {points.shape}")
    if points.shape[0] < 1:
        raise ShapeError("At least one sampling frequency is required")
    if not np.all(np.isfinite(points)):
        raise DomainError("Sampling frequencies must be finite")
    dim = points.ndim
    if J < 1:
        raise DomainError(f"Scale J must be at least 1, got {J}")
    if family.p > 1 and 2 ** J < 2 * family.p:
        raise DomainError(f"Scale J={J} is too small for {family.name}: need 2^J >= {2 * family.p}")
    N = 2 ** J
    if bandwidth is not None and np.max(np.abs(points)) > bandwidth:
        raise DomainError(f"Sampling frequencies exceed the bandwidth {bandwidth}")
    scaled = points / N
    if not alias and (np.any(scaled < -0.5) or np.any(scaled >= 0.5)):
        raise DomainError(f"Bandwidth exceeded: scaled frequencies must lie in [-1/2, 1/2) at J={J}, "
                          f"largest |xi| is {np.max(np.abs(points))}")

    row_scale = None
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (points.shape[0],):
            raise ShapeError(f"Expected {points.shape[0]} weights, got shape {weights.shape}")
        if np.any(weights < 0):
            raise DomainError("Weights must be nonnegative")
        row_scale = np.sqrt(weights)

    options = dict(alias=alias, sigma=sigma, w=w, kernel=kernel, terms=terms, depth=depth)
    plan = None
    tensor_grid = False
    row_weights = None
    if dim == 1:
        epsilon = nufft.detect_uniform(points) if uniform_fast_path and points.shape[0] >= N else None
        axes = (_make_axis(family, J, points, row_scale, epsilon=epsilon, **options),)
    else:
        line = _tensor_lines(points) if uniform_fast_path else None
        epsilon = nufft.detect_uniform(line) if line is not None and line.shape[0] >= N else None
        if epsilon is not None:
            tensor_grid = True
            row_weights = row_scale
            axes = (
                _make_axis(family, J, line, None, epsilon=epsilon, **options),
                _make_axis(family, J, line, None, epsilon=epsilon, **options),
            )
        else:
            axes = (
                _make_axis(family, J, points[:, 0], row_scale, epsilon=None, **options),
                _make_axis(family, J, points[:, 1], None, epsilon=None, **options),
            )
            plan = nufft.plan_nfft(2, (N, N), _fold(scaled) if alias else scaled, sigma, w, kernel)

    path = 'uniform FFT' if all(axis.epsilon is not None for axis in axes) else 'NFFT'
    logger.info(f"Built {dim}D operator: {family.name}, J={J}, M={points.shape[0]}, N={N}, "
                f"{'weighted' if weights is not None else 'unweighted'}, {path} path")
    return Freq2WaveOp(
        dim=dim, family=family, J=J, points=points, weights=weights, alias=alias, axes=axes,
        plan=plan, tensor_grid=tensor_grid, row_weights=row_weights, densify_cap=densify_cap,
    )


def _coefficients(op, coeffs):
    coeffs = np.asarray(coeffs, dtype=complex)
    if op.dim == 2 and coeffs.shape == (op.N * op.N,):
        coeffs = coeffs.reshape((op.N, op.N), order='F')
    if coeffs.shape != op.coefficient_shape:
        raise ShapeError(f"Expected coefficients of shape {op.coefficient_shape}, got {coeffs.shape}")
    return coeffs


def _interior_2d(op, X):
    X = np.array(X, dtype=complex)
    p, N = op.p, op.N
    if p:
        X[:p, :] = 0
        X[N - p:, :] = 0
        X[:, :p] = 0
        X[:, N - p:] = 0
    return X


def _edge_blocks(op, axis):
    p, N = op.p, op.N
    return ((slice(0, p), axis.L), (slice(N - p, N), axis.R))


def apply_forward(op, coeffs):
    """Samples T x; 2D coefficients may be an N x N array or a column-stacked vector."""
    coeffs = _coefficients(op, coeffs)
    if op.dim == 1:
        return op.axes[0].forward(coeffs)

    ax, ay = op.axes
    if op.tensor_grid:
        partial = ax.forward(coeffs)
        grid = ay.forward(partial.T).T
        y = grid.ravel(order='F')
        return y * op.row_weights if op.row_weights is not None else y

    y = ax.D * ay.D * nufft.nfft_forward(op.plan, _interior_2d(op, coeffs))
    if op.p:
        for sx, Bx in _edge_blocks(op, ax):
            for sy, By in _edge_blocks(op, ay):
                y += np.sum((Bx @ coeffs[sx, sy]) * By, axis=1)
            rows = ay.interior(coeffs[sx, :].T)
            y += ay.D * np.sum(Bx * ay.transform(rows), axis=1)
        for sy, By in _edge_blocks(op, ay):
            columns = ax.interior(coeffs[:, sy])
            y += ax.D * np.sum(By * ax.transform(columns), axis=1)
    return y


def apply_adjoint(op, samples):
    """Coefficients T* y, shaped like the operator's coefficient grid."""
    y = np.asarray(samples, dtype=complex)
    if y.shape != (op.M,):
        raise ShapeError(f"Expected {op.M} samples, got shape {y.shape}")
    if op.dim == 1:
        return op.axes[0].adjoint(y)

    ax, ay = op.axes
    if op.tensor_grid:
        if op.row_weights is not None:
            y = y * op.row_weights
        grid = y.reshape((ax.M, ay.M), order='F')
        partial = ax.adjoint(grid)
        return ay.adjoint(partial.T).T

    X = _interior_2d(op, nufft.nfft_adjoint(op.plan, np.conj(ax.D * ay.D) * y))
    if op.p:
        for sx, Bx in _edge_blocks(op, ax):
            for sy, By in _edge_blocks(op, ay):
                X[sx, sy] += Bx.conj().T @ (By.conj() * y[:, None])
            u = Bx.conj() * (ay.D.conj() * y)[:, None]
            X[sx, :] += ay.interior(ay.transform_adjoint(u)).T
        for sy, By in _edge_blocks(op, ay):
            u = By.conj() * (ax.D.conj() * y)[:, None]
            X[:, sy] += ax.interior(ax.transform_adjoint(u))
    return X


def densify(op, cap=None):
    """Dense M x N (or M x N^2, column-stacked) matrix of the operator."""
    cap = op.densify_cap if cap is None else cap
    rows, cols = op.shape
    if rows * cols > cap:
        raise DomainError(f"Dense matrix of {rows}x{cols} entries exceeds the cap of {cap}")
    if op.dim == 1:
        return op.axes[0].dense()

    ax, ay = (axis.dense() for axis in op.axes)
    if op.tensor_grid:
        side = ax.shape[0]
        ax = ax[np.tile(np.arange(side), side)]
        ay = ay[np.repeat(np.arange(side), side)]
    matrix = (ax[:, :, None] * ay[:, None, :]).transpose(0, 2, 1).reshape(rows, cols)
    if op.tensor_grid and op.row_weights is not None:
        matrix *= op.row_weights[:, None]
    return matrix
