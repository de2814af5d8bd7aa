# SPDX-License-Identifier: MIT

"""Nonuniform discrete Fourier transforms.

Conventions: a grid of length N holds coefficients for k = -N/2..N/2-1 at
array positions 0..N-1 (in 2D, ``x[a, b]`` pairs with (k_a, k_b) and the
last axis runs fastest in the flattened order). Points are already scaled to
the band [-1/2, 1/2); nothing here rescales silently.

The fast transform is the usual window-gridding scheme: deconvolve by the
window's Fourier transform, FFT onto a grid oversampled by sigma, then
interpolate to each point over the 2w nearest grid nodes. The adjoint spreads
with ``np.bincount`` so the accumulation order is fixed.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from gensampling.errors import DomainError, ParameterError, ShapeError

logger = logging.getLogger(__name__)

KERNELS = ('kaiser_bessel', 'gaussian')

DEFAULT_SIGMA = 2.0
DEFAULT_HALF_WIDTH = 6
DEFAULT_KERNEL = 'kaiser_bessel'

UNIFORM_TOLERANCE = 1e-12

_CHUNK = 4096


def _as_points(points, dim=None):
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if points.ndim != 2 or points.shape[1] not in (1, 2):
        raise ShapeError(f"Points must have shape (M,) or (M, 2), got {points.shape}")
    if dim is not None and points.shape[1] != dim:
        raise ShapeError(f"Expected {dim}-dimensional points, got {points.shape[1]}")
    if points.shape[0] < 1:
        raise ShapeError("At least one sampling point is required")
    if not np.all(np.isfinite(points)):
        raise DomainError("Sampling points must be finite")
    return points


def check_band(points):
    """Raise unless every scaled coordinate lies in [-1/2, 1/2)."""
    if np.any(points < -0.5) or np.any(points >= 0.5):
        worst = np.max(np.abs(points))
        raise DomainError(f"Scaled points must lie in [-1/2, 1/2), largest magnitude is {worst}")


def frequencies(N):
    """Translation indices -N/2..N/2-1 of a length-N grid."""
    return np.arange(N) - N // 2


def ndft_forward(points, x):
    """Direct NDFT y_m = sum_k x_k exp(-2 pi i k . xi_m)."""
    x = np.asarray(x, dtype=complex)
    points = _as_points(points, x.ndim)
    check_band(points)
    for N in x.shape:
        if N % 2:
            raise ShapeError(f"Grid lengths must be even, got {x.shape}")
    if x.ndim == 1:
        return np.exp(-2j * np.pi * np.outer(points[:, 0], frequencies(x.shape[0]))) @ x

    y = np.empty(points.shape[0], dtype=complex)
    for lo in range(0, points.shape[0], _CHUNK):
        chunk = points[lo:lo + _CHUNK]
        ex = np.exp(-2j * np.pi * np.outer(chunk[:, 0], frequencies(x.shape[0])))
        ey = np.exp(-2j * np.pi * np.outer(chunk[:, 1], frequencies(x.shape[1])))
        y[lo:lo + _CHUNK] = np.sum((ex @ x) * ey, axis=1)
    return y


def ndft_adjoint(points, y, N):
    """Direct adjoint z_k = sum_m y_m exp(+2 pi i k . xi_m)."""
    N = (N,) if np.isscalar(N) else tuple(N)
    points = _as_points(points, len(N))
    check_band(points)
    y = np.asarray(y, dtype=complex)
    if y.shape != (points.shape[0],):
        raise ShapeError(f"Expected {points.shape[0]} samples, got shape {y.shape}")
    if len(N) == 1:
        return np.exp(2j * np.pi * np.outer(frequencies(N[0]), points[:, 0])) @ y

    z = np.zeros(N, dtype=complex)
    for lo in range(0, points.shape[0], _CHUNK):
        chunk = points[lo:lo + _CHUNK]
        ex = np.exp(2j * np.pi * np.outer(chunk[:, 0], frequencies(N[0])))
        ey = np.exp(2j * np.pi * np.outer(chunk[:, 1], frequencies(N[1])))
        z += (ex * y[lo:lo + _CHUNK, None]).T @ ey
    return z


def _kaiser_bessel_beta(sigma, w):
    width = 2 * w
    return np.pi * np.sqrt((width / sigma) ** 2 * (sigma - 0.5) ** 2 - 0.8)


def _gaussian_shape(sigma, w):
    return 2 * sigma / (2 * sigma - 1) * w / np.pi


def _window(kernel, sigma, w, u):
    """Window at grid offsets u, zero for |u| > w."""
    if kernel == 'kaiser_bessel':
        beta = _kaiser_bessel_beta(sigma, w)
        ratio = np.clip(1 - (u / w) ** 2, 0, None)
        values = special.i0(beta * np.sqrt(ratio))
    else:
        values = np.exp(-u ** 2 / _gaussian_shape(sigma, w))
    return np.where(np.abs(u) <= w, values, 0.0)


def _window_transform(kernel, sigma, w, nu):
    """Continuous Fourier transform of the window at nu cycles per grid node."""
    if kernel == 'kaiser_bessel':
        beta = _kaiser_bessel_beta(sigma, w)
        width = 2 * w
        root = np.sqrt((beta ** 2 - (np.pi * width * nu) ** 2).astype(complex))
        safe = np.where(root == 0, 1.0, root)
        return np.real(np.where(root == 0, width, width * np.sinh(safe) / safe))
    b = _gaussian_shape(sigma, w)
    return np.sqrt(np.pi * b) * np.exp(-(np.pi * nu) ** 2 * b)


def oversampled_length(N, sigma):
    """Smallest even integer >= sigma * N."""
    n = int(math.ceil(sigma * N - 1e-9))
    return n + (n % 2)


@dataclass(frozen=True, eq=False)
class NfftPlan:
    dim: int
    N: tuple
    n: tuple
    points: np.ndarray
    sigma: float
    w: int
    kernel: str
    neighbours: tuple
    window: tuple
    deconvolution: tuple

    @property
    def M(self):
        return self.points.shape[0]


def plan_nfft(dim, N, points, sigma=DEFAULT_SIGMA, w=DEFAULT_HALF_WIDTH, kernel=DEFAULT_KERNEL):
    """Precompute neighbour indices, window values and deconvolution factors."""
    N = (N,) * dim if np.isscalar(N) else tuple(int(v) for v in N)
    if dim not in (1, 2) or len(N) != dim:
        raise ParameterError(f"Plan dimension {dim} does not match N={N}")
    if any(v < 2 or v % 2 for v in N):
        raise ParameterError(f"Transform lengths must be even and positive, got {N}")
    if sigma < 1.25:
        raise ParameterError(f"Oversampling factor must be at least 1.25, got {sigma}")
    if w < 2:
        raise ParameterError(f"Kernel half-width must be at least 2, got {w}")
    if kernel not in KERNELS:
        raise ParameterError(f"Unknown window '{kernel}', expected one of {', '.join(KERNELS)}")
    points = _as_points(points, dim)
    check_band(points)

    n = tuple(oversampled_length(v, sigma) for v in N)
    offsets = np.arange(-w + 1, w + 1)
    neighbours, window, deconvolution = [], [], []
    for axis in range(dim):
        t = n[axis] * points[:, axis]
        nodes = np.floor(t).astype(np.int64)[:, None] + offsets[None, :]
        neighbours.append(np.mod(nodes, n[axis]))
        window.append(_window(kernel, sigma, w, t[:, None] - nodes))
        deconvolution.append(1.0 / _window_transform(kernel, sigma, w, frequencies(N[axis]) / n[axis]))

    logger.debug(f"Planned {dim}D NFFT: N={N}, oversampled {n}, M={points.shape[0]}, {kernel} window w={w}")
    return NfftPlan(
        dim=dim, N=N, n=n, points=points, sigma=sigma, w=w, kernel=kernel,
        neighbours=tuple(neighbours), window=tuple(window), deconvolution=tuple(deconvolution),
    )


def _check_grid(plan, x):
    x = np.asarray(x, dtype=complex)
    if x.shape != plan.N:
        raise ShapeError(f"Expected grid of shape {plan.N}, got {x.shape}")
    return x


def nfft_forward(plan, x):
    x = _check_grid(plan, x)
    if plan.dim == 1:
        padded = np.zeros(plan.n[0], dtype=complex)
        padded[np.mod(frequencies(plan.N[0]), plan.n[0])] = x * plan.deconvolution[0]
        g = np.fft.fft(padded)
        return np.sum(g[plan.neighbours[0]] * plan.window[0], axis=1)

    padded = np.zeros(plan.n, dtype=complex)
    rows = np.mod(frequencies(plan.N[0]), plan.n[0])
    cols = np.mod(frequencies(plan.N[1]), plan.n[1])
    padded[np.ix_(rows, cols)] = x * np.outer(plan.deconvolution[0], plan.deconvolution[1])
    g = np.fft.fft2(padded)
    y = np.empty(plan.M, dtype=complex)
    for lo in range(0, plan.M, _CHUNK):
        hi = min(lo + _CHUNK, plan.M)
        ix, iy = plan.neighbours[0][lo:hi], plan.neighbours[1][lo:hi]
        wx, wy = plan.window[0][lo:hi], plan.window[1][lo:hi]
        local = g[ix[:, :, None], iy[:, None, :]]
        y[lo:hi] = np.einsum('mab,ma,mb->m', local, wx, wy)
    return y


def _spread(index, weights, values, size):
    flat = index.ravel()
    contribution = (weights * values[:, None]).ravel() if weights.ndim == 2 else (weights * values[:, None, None]).ravel()
    real = np.bincount(flat, weights=contribution.real, minlength=size)
    imag = np.bincount(flat, weights=contribution.imag, minlength=size)
    return real + 1j * imag


def nfft_adjoint(plan, y):
    y = np.asarray(y, dtype=complex)
    if y.shape != (plan.M,):
        raise ShapeError(f"Expected {plan.M} samples, got shape {y.shape}")
    if plan.dim == 1:
        s = _spread(plan.neighbours[0], plan.window[0], y, plan.n[0])
        z = plan.n[0] * np.fft.ifft(s)
        return z[np.mod(frequencies(plan.N[0]), plan.n[0])] * plan.deconvolution[0]

    size = plan.n[0] * plan.n[1]
    s = np.zeros(size, dtype=complex)
    for lo in range(0, plan.M, _CHUNK):
        hi = min(lo + _CHUNK, plan.M)
        ix, iy = plan.neighbours[0][lo:hi], plan.neighbours[1][lo:hi]
        index = ix[:, :, None] * plan.n[1] + iy[:, None, :]
        weights = plan.window[0][lo:hi, :, None] * plan.window[1][lo:hi, None, :]
        s += _spread(index, weights, y[lo:hi], size)
    z = size * np.fft.ifft2(s.reshape(plan.n))
    rows = np.mod(frequencies(plan.N[0]), plan.n[0])
    cols = np.mod(frequencies(plan.N[1]), plan.n[1])
    return z[np.ix_(rows, cols)] * np.outer(plan.deconvolution[0], plan.deconvolution[1])


def _uniform_parameters(M, epsilon, N):
    if epsilon <= 0:
        raise ParameterError(f"Grid spacing must be positive, got {epsilon}")
    ratio = 1.0 / epsilon
    inverse = int(round(ratio))
    if inverse < 1 or abs(ratio - inverse) > 1e-9 * ratio:
        raise ParameterError(f"1/epsilon must be a positive integer, got epsilon={epsilon}")
    if M < N:
        raise ParameterError(f"Uniform reduction needs M >= N, got M={M}, N={N}")
    q = max(1, -(-M // (N * inverse)))
    return q, q * N * inverse


def uniform_points(M, epsilon, N):
    """Scaled points (epsilon/N)(m-1-M/2), m = 1..M."""
    return epsilon / N * (np.arange(M) - M / 2)


def uniform_ndft_fft(x, M, epsilon, N):
    """NDFT on the uniform points (epsilon/N)(m-1-M/2) through one length-N2 FFT.

    ``x`` has length N1 <= N along axis 0; further axes are transformed
    independently.
    """
    x = np.asarray(x, dtype=complex)
    N1 = x.shape[0]
    if N1 > N or N1 % 2:
        raise ParameterError(f"Grid length N1={N1} must be even and at most N={N}")
    q, N2 = _uniform_parameters(M, epsilon, N)
    ell = np.arange(N1)
    z = np.zeros((N2,) + x.shape[1:], dtype=complex)
    phase = np.exp(1j * np.pi * ell * epsilon * M / N)
    z[q * ell] = x * phase.reshape((N1,) + (1,) * (x.ndim - 1))
    xi = uniform_points(M, epsilon, N)
    shift = np.exp(1j * np.pi * N1 * xi).reshape((M,) + (1,) * (x.ndim - 1))
    return shift * np.fft.fft(z, axis=0)[:M]


def uniform_ndft_fft_adjoint(y, N1, epsilon, N):
    """Adjoint of uniform_ndft_fft: length-M data back to a length-N1 grid."""
    y = np.asarray(y, dtype=complex)
    M = y.shape[0]
    if N1 > N or N1 % 2:
        raise ParameterError(f"Grid length N1={N1} must be even and at most N={N}")
    q, N2 = _uniform_parameters(M, epsilon, N)
    xi = uniform_points(M, epsilon, N)
    u = np.zeros((N2,) + y.shape[1:], dtype=complex)
    u[:M] = y * np.exp(-1j * np.pi * N1 * xi).reshape((M,) + (1,) * (y.ndim - 1))
    spread = N2 * np.fft.ifft(u, axis=0)
    ell = np.arange(N1)
    phase = np.exp(-1j * np.pi * ell * epsilon * M / N)
    return spread[q * ell] * phase.reshape((N1,) + (1,) * (y.ndim - 1))


def detect_uniform(points):
    """Spacing epsilon if points are epsilon(m-1-M/2) with 1/epsilon integral, else None."""
    points = np.asarray(points, dtype=float)
    M = points.shape[0]
    if points.ndim != 1 or M < 2:
        return None
    epsilon = points[1] - points[0]
    if epsilon <= 0:
        return None
    inverse = round(1.0 / epsilon)
    if inverse < 1 or abs(1.0 / epsilon - inverse) > 1e-9 / epsilon:
        return None
    epsilon = 1.0 / inverse
    expected = epsilon * (np.arange(M) - M / 2)
    if np.max(np.abs(points - expected)) > UNIFORM_TOLERANCE * max(1.0, np.max(np.abs(expected))):
        return None
    return epsilon
