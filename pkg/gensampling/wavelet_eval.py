# SPDX-License-Identifier: MIT

"""Time-domain values of scaling functions on dyadic grids.

Tables are built by the cascade algorithm: values at the integers first,
then one two-scale refinement per resolution level. A coefficient vector of
V_J^int is evaluated through a sparse evaluation matrix assembled from
those tables.
"""

import functools
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg, sparse

from gensampling.errors import DomainError, NumericalFailureError, ShapeError
from gensampling.wavelet_fourier import boundary_filters, get_family

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """Samples of one function at start + i/2^R, i = 0..len(values)-1."""
    family: str
    kind: str
    index: Optional[int]
    R: int
    start: int
    values: np.ndarray

    @property
    def stop(self):
        return self.start + (len(self.values) - 1) // 2 ** self.R

    @property
    def x(self):
        return self.start + np.arange(len(self.values)) / 2 ** self.R

    def lookup(self, y):
        """Values at dyadic points y of resolution R, zero outside the support."""
        position = np.rint((np.asarray(y, dtype=float) - self.start) * 2 ** self.R).astype(np.int64)
        inside = (position >= 0) & (position < len(self.values))
        result = np.zeros(position.shape)
        result[inside] = self.values[position[inside]]
        return result


@dataclass(frozen=True, eq=False)
class ReconstructionEvaluation:
    R: int
    x: np.ndarray
    values: np.ndarray

    @property
    def dim(self):
        return self.values.ndim


def dyadic_grid(R):
    """Closed grid -1/2 + i/2^R, i = 0..2^R, over [-1/2, 1/2]."""
    if R < 0:
        raise DomainError(f"Resolution must be nonnegative, got {R}")
    return -0.5 + np.arange(2 ** R + 1) / 2 ** R


def _refine_interior(previous, level, taps, offset, start):
    """One cascade step phi(x) = sum_k 2 h_k phi(2x - k) from level-1 to level."""
    length = (len(previous) - 1) * 2 + 1
    refined = np.zeros(length)
    refined[::2] = previous
    odd = np.arange(1, length, 2)
    step = 2 ** (level - 1)
    for i, tap in enumerate(taps):
        k = offset + i
        index = odd + (start - k) * step
        inside = (index >= 0) & (index < len(previous))
        refined[odd[inside]] += 2 * tap * previous[index[inside]]
    return refined


def _integer_values(family):
    """phi(n) for n = -p+1..p from the eigenvector of the two-scale matrix."""
    p = family.p
    if p == 1:
        return np.array([1.0, 0.0])
    nodes = np.arange(-p + 1, p + 1)
    transfer = np.zeros((len(nodes), len(nodes)))
    for row, n in enumerate(nodes):
        for col, m in enumerate(nodes):
            index = 2 * n - m - family.offset
            if 0 <= index < len(family.filter):
                transfer[row, col] = 2 * family.filter[index]
    eigenvalues, eigenvectors = linalg.eig(transfer)
    nearest = np.argmin(np.abs(eigenvalues - 1))
    if abs(eigenvalues[nearest] - 1) > 1e-8:
        raise NumericalFailureError(f"Two-scale matrix of {family.name} has no eigenvalue 1")
    vector = np.real(eigenvectors[:, nearest])
    values = vector / np.sum(vector)
    values[0] = values[-1] = 0.0
    return values


@functools.lru_cache(maxsize=None)
def _scaling_table(name, R):
    family = get_family(name)
    if R == 0:
        values = _integer_values(family)
    else:
        values = _refine_interior(_scaling_table(name, R - 1).values, R, family.filter, family.offset, family.offset)
    values.setflags(write=False)
    return FunctionTable(family=name, kind='interior', index=None, R=R, start=family.offset, values=values)


def evaluate_scaling_dyadic(family, R):
    """Table of the interior scaling function over [-p+1, p] at spacing 2^-R."""
    if R < 0:
        raise DomainError(f"Resolution must be nonnegative, got {R}")
    return _scaling_table(get_family(family).name, R)


def _reflected_interior(name, R):
    """Table of phi(1 - x), the scaling function of the reflected filter."""
    table = _scaling_table(name, R)
    return table.values[::-1].copy()


def _integer_boundary_values(name, filters, base, scaled_H, scaled_h):
    """Boundary values at the integers from the coupled dilation equations.

    At 0 the equations reduce to v = sqrt(2) H v, so phi_k(0) is the
    eigenvector for eigenvalue 1, scaled to the truncated-translate
    expansion. A node n >= 1 only couples to 2n, which leaves a unit
    triangular system once the interior integer values ``base`` are known.
    """
    p = scaled_H.shape[0]
    interior_m = np.arange(p, 3 * p - 1)

    slots = [(k, n) for k in range(p) for n in range(1, p + k + 1)]
    position = {slot: i for i, slot in enumerate(slots)}
    system = np.eye(len(slots))
    rhs = np.zeros(len(slots))
    for (k, n), row in position.items():
        for l in range(p):
            col = position.get((l, 2 * n))
            if col is not None:
                system[row, col] -= scaled_H[k, l]
        # base starts at -p+1
        index = 2 * n - interior_m + p - 1
        inside = (index >= 0) & (index < len(base))
        rhs[row] = scaled_h[k, inside] @ base[index[inside]]
    try:
        solution = linalg.solve(system, rhs)
    except linalg.LinAlgError as e:
        raise NumericalFailureError(f"Boundary dilation system of {name} is singular: {e}")

    eigenvalues, eigenvectors = linalg.eig(scaled_H)
    nearest = np.argmin(np.abs(eigenvalues - 1))
    if abs(eigenvalues[nearest] - 1) > 1e-8:
        raise NumericalFailureError(f"Boundary refinement matrix of {name} has no eigenvalue 1")
    edge = np.real(eigenvectors[:, nearest])
    translates = np.arange(-p + 1, p)
    at_zero = filters.expansion @ base[p - 1 - translates]
    edge = edge * (edge @ at_zero) / (edge @ edge)

    tables = []
    for k in range(p):
        values = np.zeros(p + k + 1)
        values[0] = edge[k]
        values[1:] = [solution[position[(k, n)]] for n in range(1, p + k + 1)]
        tables.append(values)
    return tables


@functools.lru_cache(maxsize=None)
def _half_line_tables(name, side, R):
    """Boundary functions on [0, p+k] built with the filter of the given edge."""
    family = get_family(name)
    p = family.p
    filters = boundary_filters(family, side)
    interior_at = [
        _scaling_table(name, level).values if side == 'left' else _reflected_interior(name, level)
        for level in range(R + 1)
    ]

    scaled_H = np.sqrt(2) * filters.H
    scaled_h = np.sqrt(2) * filters.h
    interior_m = np.arange(p, 3 * p - 1)
    tables = _integer_boundary_values(name, filters, interior_at[0], scaled_H, scaled_h)
    for level in range(1, R + 1):
        step = 2 ** (level - 1)
        previous_interior = interior_at[level - 1]
        refined_tables = []
        for k in range(p):
            length = (p + k) * 2 ** level + 1
            odd = np.arange(1, length, 2)
            refined = np.zeros(length)
            refined[::2] = tables[k]
            acc = np.zeros(len(odd))
            for l in range(p):
                inside = odd < len(tables[l])
                acc[inside] += scaled_H[k, l] * tables[l][odd[inside]]
            for col, m in enumerate(interior_m):
                if scaled_h[k, col] == 0.0:
                    continue
                index = odd + (p - 1 - m) * step
                inside = (index >= 0) & (index < len(previous_interior))
                acc[inside] += scaled_h[k, col] * previous_interior[index[inside]]
            refined[odd] = acc
            refined_tables.append(refined)
        tables = refined_tables
    return tables


@functools.lru_cache(maxsize=None)
def _boundary_tables(name, side, R):
    family = get_family(name)
    result = []
    for k, values in enumerate(_half_line_tables(name, side, R)):
        if side == 'left':
            table = FunctionTable(family=name, kind='left', index=k, R=R, start=0, values=values)
        else:
            table = FunctionTable(family=name, kind='right', index=k, R=R, start=-(family.p + k), values=values[::-1].copy())
        table.values.setflags(write=False)
        result.append(table)
    logger.debug(f"Built {side} boundary tables for {name} at resolution {R}")
    return tuple(result)


def evaluate_boundary_dyadic(family, side, R):
    """Tables of the p boundary functions at one edge.

    Left functions live on [0, p+k], right functions on [-p-k, 0]; the
    closed end at 0 is included in both.
    """
    family = get_family(family)
    if family.p < 2:
        raise DomainError(f"Family {family.name} has no boundary functions")
    if side not in ('left', 'right'):
        raise DomainError(f"Unknown edge '{side}', expected 'left' or 'right'")
    if R < 0:
        raise DomainError(f"Resolution must be nonnegative, got {R}")
    return _boundary_tables(family.name, side, R)


def boundary_expansion(family, side, R):
    """Boundary functions from their closed form in truncated interior translates.

    Independent of the refinement filters H and h; used to cross-check the
    cascade tables.
    """
    family = get_family(family)
    if family.p < 2:
        raise DomainError(f"Family {family.name} has no boundary functions")
    p = family.p
    filters = boundary_filters(family, side)
    interior = _scaling_table(family.name, R).values if side == 'left' else _reflected_interior(family.name, R)
    result = []
    for k in range(p):
        nodes = np.arange((p + k) * 2 ** R + 1)
        values = np.zeros(len(nodes))
        for n, coefficient in zip(range(-p + 1, p), filters.expansion[k]):
            position = nodes + (p - 1 - n) * 2 ** R
            inside = (position >= 0) & (position < len(interior))
            values[inside] += coefficient * interior[position[inside]]
        result.append(values if side == 'left' else values[::-1].copy())
    return result


def _check_scale(family, J, R):
    if J < 0:
        raise DomainError(f"Scale J must be nonnegative, got {J}")
    if R < J:
        raise DomainError(f"Resolution {R} is coarser than scale {J}")
    if family.p > 1 and 2 ** J < 2 * family.p:
        raise DomainError(f"Scale J={J} is too small for {family.name}: need 2^J >= {2 * family.p}")


@functools.lru_cache(maxsize=16)
def _basis_matrix(name, J, R):
    family = get_family(name)
    N = 2 ** J
    level = R - J
    p = family.p if family.p > 1 else 0
    grid_index = np.arange(2 ** R + 1)
    rows, cols, data = [], [], []

    def place(column, table, shift):
        # table argument y = 2^J x - shift
        position = grid_index + (-(N // 2) - shift - table.start) * 2 ** level
        inside = (position >= 0) & (position < len(table.values))
        values = table.values[position[inside]]
        keep = values != 0.0
        rows.append(grid_index[inside][keep])
        cols.append(np.full(np.count_nonzero(keep), column))
        data.append(2 ** (J / 2) * values[keep])

    interior = evaluate_scaling_dyadic(family, level)
    for n in range(p, N - p):
        place(n, interior, n - N // 2)
    if p:
        for k, table in enumerate(evaluate_boundary_dyadic(family, 'left', level)):
            place(k, table, -(N // 2))
        for k, table in enumerate(evaluate_boundary_dyadic(family, 'right', level)):
            place(N - 1 - k, table, N // 2)

    matrix = sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(2 ** R + 1, N),
    )
    return matrix


def basis_matrix(family, J, R):
    """Sparse (2^R+1) x 2^J matrix of the V_J^int basis on the dyadic grid.

    Column n holds the n-th basis function (left boundary, interior, right
    boundary in that order) sampled at dyadic_grid(R).
    """
    family = get_family(family)
    _check_scale(family, J, R)
    return _basis_matrix(family.name, J, R)


def _real_coefficients(coeffs):
    coeffs = np.asarray(coeffs)
    if np.iscomplexobj(coeffs):
        if np.any(coeffs.imag != 0):
            raise DomainError("Evaluation only accepts real coefficients, take the real part first")
        coeffs = coeffs.real
    return coeffs.astype(float)


def weval_1d(coeffs, family, J, R):
    """Evaluate sum_n w_n phi_n on the closed dyadic grid of resolution R."""
    family = get_family(family)
    coeffs = _real_coefficients(coeffs)
    if coeffs.shape != (2 ** J,):
        raise ShapeError(f"Expected {2 ** J} coefficients for J={J}, got shape {coeffs.shape}")
    matrix = basis_matrix(family, J, R)
    return ReconstructionEvaluation(R=R, x=dyadic_grid(R), values=matrix @ coeffs)


def weval_2d(coeffs, family, J, R):
    """Tensor evaluation; ``coeffs[ix, iy]`` and ``values[i, j]`` at (x_i, y_j)."""
    family = get_family(family)
    coeffs = _real_coefficients(coeffs)
    N = 2 ** J
    if coeffs.shape != (N, N):
        raise ShapeError(f"Expected {N}x{N} coefficients for J={J}, got shape {coeffs.shape}")
    matrix = basis_matrix(family, J, R)
    partial = matrix @ coeffs
    values = np.asarray((matrix @ partial.T).T)
    return ReconstructionEvaluation(R=R, x=dyadic_grid(R), values=values)
