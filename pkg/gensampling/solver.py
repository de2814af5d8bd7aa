# SPDX-License-Identifier: MIT

"""Matrix-free least squares on the normal equations T* T x = T* b.

Two Krylov methods are available: ``cgnr`` (conjugate gradients, minimises
the data residual ||T x - b|| over the Krylov space) and ``crls``
(conjugate residuals, minimises the normal residual ||T*(T x - b)||). Both
stop on the relative normal residual ||T*(T x - b)|| / ||T* b||.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from gensampling.errors import NumericalFailureError, ParameterError, ShapeError

logger = logging.getLogger(__name__)

METHODS = ('cgnr', 'crls')

DEFAULT_TOLERANCE = 1e-10
DEFAULT_ITERATION_FACTOR = 2


@dataclass(frozen=True)
class SolveOptions:
    max_iterations: Optional[int] = None
    tolerance: float = DEFAULT_TOLERANCE
    initial_guess: Optional[np.ndarray] = None
    method: str = 'cgnr'


@dataclass
class SolveStats:
    iterations: int
    residual: float
    converged: bool
    method: str
    residual_history: list = field(default_factory=list)
    data_residual_history: list = field(default_factory=list)

    def as_dict(self):
        return {
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
            "method": self.method,
            "residual_history": list(self.residual_history),
            "data_residual_history": list(self.data_residual_history),
        }


def _norm(v):
    return float(np.linalg.norm(np.ravel(v)))


def _inner(u, v):
    return np.vdot(u, v)


def _validate(op, samples, options):
    if options.method not in METHODS:
        raise ParameterError(f"Unknown solver method '{options.method}', expected one of {', '.join(METHODS)}")
    if not options.tolerance > 0:
        raise ParameterError(f"Tolerance must be positive, got {options.tolerance}")
    max_iterations = options.max_iterations
    if max_iterations is None:
        max_iterations = DEFAULT_ITERATION_FACTOR * op.shape[1]
    if max_iterations < 1:
        raise ParameterError(f"max_iterations must be at least 1, got {max_iterations}")
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != (op.M,):
        raise ShapeError(f"Expected {op.M} samples, got shape {samples.shape}")
    return samples, max_iterations


def _cgnr(op, b, x, max_iterations, tolerance, reference, stats):
    r = b - op.forward(x)
    s = op.adjoint(r)
    p = s.copy()
    gamma = _norm(s) ** 2
    stats.residual_history.append(np.sqrt(gamma) / reference)
    stats.data_residual_history.append(_norm(r))
    while stats.iterations < max_iterations and stats.residual_history[-1] > tolerance:
        q = op.forward(p)
        alpha = gamma / _norm(q) ** 2
        x += alpha * p
        r -= alpha * q
        s = op.adjoint(r)
        gamma_next = _norm(s) ** 2
        p *= gamma_next / gamma
        p += s
        gamma = gamma_next
        stats.iterations += 1
        stats.residual_history.append(np.sqrt(gamma) / reference)
        stats.data_residual_history.append(_norm(r))
        logger.debug(f"cgnr iteration {stats.iterations}: normal residual {stats.residual_history[-1]:.3e}")
    return x


def _crls(op, b, x, max_iterations, tolerance, reference, stats):
    r_data = b - op.forward(x)
    r = op.adjoint(r_data)
    Ar = op.forward(r)
    Br = op.adjoint(Ar)
    p = r.copy()
    Ap = Ar.copy()
    Bp = Br.copy()
    rho = _norm(Ar) ** 2
    stats.residual_history.append(_norm(r) / reference)
    stats.data_residual_history.append(_norm(r_data))
    while stats.iterations < max_iterations and stats.residual_history[-1] > tolerance:
        alpha = rho / _norm(Bp) ** 2
        x += alpha * p
        r -= alpha * Bp
        r_data -= alpha * Ap
        Ar = op.forward(r)
        Br = op.adjoint(Ar)
        rho_next = _norm(Ar) ** 2
        beta = rho_next / rho
        rho = rho_next
        p *= beta
        p += r
        Ap *= beta
        Ap += Ar
        Bp *= beta
        Bp += Br
        stats.iterations += 1
        stats.residual_history.append(_norm(r) / reference)
        stats.data_residual_history.append(_norm(r_data))
        logger.debug(f"crls iteration {stats.iterations}: normal residual {stats.residual_history[-1]:.3e}")
    return x


def solve_least_squares(op, samples, options=None):
    """Minimise ||T x - b|| (rows weighted by sqrt(mu) on weighted operators).

    ``samples`` are raw data; on a weighted operator they are scaled by
    sqrt(mu_m) here. Returns ``(coefficients, SolveStats)``; running out of
    iterations is reported through ``SolveStats.converged``.
    """
    options = options or SolveOptions()
    samples, max_iterations = _validate(op, samples, options)
    b = op.weigh(samples)

    reference = _norm(op.adjoint(b))
    if options.initial_guess is None:
        x = np.zeros(op.coefficient_shape, dtype=complex)
    else:
        x = np.array(options.initial_guess, dtype=complex).reshape(op.coefficient_shape, order='F')

    stats = SolveStats(iterations=0, residual=0.0, converged=True, method=options.method)
    if reference == 0.0:
        logger.info("Right-hand side has no component in the range of T*, returning zero")
        stats.residual_history.append(0.0)
        stats.data_residual_history.append(_norm(b))
        return np.zeros(op.coefficient_shape, dtype=complex), stats

    iterate = _cgnr if options.method == 'cgnr' else _crls
    x = iterate(op, b, x, max_iterations, options.tolerance, reference, stats)
    stats.residual = float(stats.residual_history[-1])
    stats.converged = bool(stats.residual <= options.tolerance)
    if stats.converged:
        logger.info(f"{options.method} converged in {stats.iterations} iterations, relative normal residual {stats.residual:.3e}")
    else:
        logger.warning(f"{options.method} stopped after {stats.iterations} iterations without converging, "
                       f"relative normal residual {stats.residual:.3e}")
    return x, stats


def dense_lsq_oracle(matrix, rhs):
    """Least-squares solution through a Cholesky factorisation of A* A."""
    matrix = np.asarray(matrix)
    rhs = np.asarray(rhs)
    if matrix.ndim != 2 or rhs.shape != (matrix.shape[0],):
        raise ShapeError(f"Incompatible shapes {matrix.shape} and {rhs.shape}")
    if np.linalg.matrix_rank(matrix) < matrix.shape[1]:
        raise NumericalFailureError("Matrix is rank deficient, the least-squares solution is not unique")
    gram = matrix.conj().T @ matrix
    try:
        factor = linalg.cho_factor(gram)
    except linalg.LinAlgError as e:
        raise NumericalFailureError(f"Normal equations are not positive definite: {e}")
    return linalg.cho_solve(factor, matrix.conj().T @ rhs)
