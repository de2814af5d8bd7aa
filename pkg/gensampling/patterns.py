# SPDX-License-Identifier: MIT

"""Sampling-pattern generators and an analytic test function."""

import logging

import numpy as np

from gensampling.errors import ParameterError

logger = logging.getLogger(__name__)


def gen_grid(M, epsilon, dim=1):
    """Points epsilon(m-1-M/2), m = 1..M; in 2D the M x M tensor grid, x fastest."""
    if M < 1:
        raise ParameterError(f"M must be at least 1, got {M}")
    if not epsilon > 0:
        raise ParameterError(f"Grid spacing must be positive, got {epsilon}")
    line = epsilon * (np.arange(M) - M / 2)
    if dim == 1:
        return line
    if dim != 2:
        raise ParameterError(f"Only 1D and 2D grids are supported, got dim={dim}")
    return np.stack([np.tile(line, M), np.repeat(line, M)], axis=1)


def gen_jitter(M, epsilon, eta, seed=0, dim=1):
    """Grid points perturbed by independent uniform offsets in [-eta, eta].

    1D output is sorted, and strictly increasing because eta < epsilon/2.
    """
    if not 0 <= eta < epsilon / 2:
        raise ParameterError(f"Jitter amplitude must satisfy 0 <= eta < epsilon/2, got eta={eta}, epsilon={epsilon}")
    points = gen_grid(M, epsilon, dim)
    if eta == 0:
        return points
    rng = np.random.default_rng(seed)
    points = points + rng.uniform(-eta, eta, size=points.shape)
    return np.sort(points) if dim == 1 else points


def gen_spiral(turns, points_per_turn, K):
    """Archimedean spiral (K t / turns)(cos 2 pi t, sin 2 pi t), t = j / points_per_turn.

    ``turns`` may be fractional; round(turns * points_per_turn) points are made.
    """
    if turns < 1:
        raise ParameterError(f"A spiral needs at least one turn, got {turns}")
    if points_per_turn < 1:
        raise ParameterError(f"points_per_turn must be at least 1, got {points_per_turn}")
    if not K > 0:
        raise ParameterError(f"Spiral radius K must be positive, got {K}")
    count = int(round(turns * points_per_turn))
    t = np.arange(count) / points_per_turn
    radius = K * t / turns
    return np.stack([radius * np.cos(2 * np.pi * t), radius * np.sin(2 * np.pi * t)], axis=1)


def truncated_cosine(x):
    """f(x) = cos(2 pi x) on [-1/2, 0), zero elsewhere."""
    x = np.asarray(x, dtype=float)
    return np.where((x >= -0.5) & (x < 0), np.cos(2 * np.pi * x), 0.0)


def _segment_transform(nu):
    # int_{-1/2}^0 exp(2 pi i nu x) dx
    nu = np.asarray(nu, dtype=float)
    safe = np.where(nu == 0, 1.0, nu)
    value = (1 - np.exp(-1j * np.pi * safe)) / (2j * np.pi * safe)
    return np.where(nu == 0, 0.5 + 0j, value)


def truncated_cosine_transform(points):
    """Fourier transform of truncated_cosine at the given frequencies."""
    xi = np.asarray(points, dtype=float)
    return 0.5 * (_segment_transform(1 - xi) + _segment_transform(-1 - xi))
