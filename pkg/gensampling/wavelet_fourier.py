# SPDX-License-Identifier: MIT

"""Filter banks and Fourier transforms of Daubechies scaling functions.

Filters are stored with sum(h) = 1 so that m0(0) = 1 and the infinite
product for the Fourier transform applies directly. The scaling function of
a family with p vanishing moments is supported on [-p+1, p]; tap h[i] sits at
translation ``offset + i`` with ``offset = -p+1``.

Boundary (interval) scaling functions follow the Cohen-Daubechies-Vial
construction. Their filters are derived from the interior filter when a
family is first requested: the p edge functions that reproduce polynomials
of degree < p on the half line are orthonormalised along nested supports
[0, p+k], which fixes the basis up to sign.
"""

import functools
import logging
from dataclasses import dataclass
from math import comb

import numpy as np
import pywt
from scipy import linalg

from gensampling.errors import DomainError, NumericalFailureError

logger = logging.getLogger(__name__)

SUPPORTED_FAMILIES = ('haar',) + tuple(f'db{p}' for p in range(2, 9))

DEFAULT_TERMS = 48
DEFAULT_DEPTH = 30

_PRODUCT_CUTOFF = 1e-16


@dataclass(frozen=True, eq=False)
class ScalingFamily:
    name: str
    p: int
    filter: np.ndarray
    offset: int

    @property
    def support(self):
        return (self.offset, self.offset + len(self.filter) - 1)

    @property
    def translations(self):
        return self.offset + np.arange(len(self.filter))

    @property
    def tag(self):
        """Family tag used in coefficient files: 0 for haar, p for dbp."""
        return 0 if self.name == 'haar' else self.p

    def m0(self, xi):
        """Low-pass filter m0(xi) = sum_k h_k exp(-2 pi i k xi)."""
        xi = np.asarray(xi, dtype=float)
        phase = np.exp(-2j * np.pi * np.multiply.outer(xi, self.translations))
        return phase @ self.filter


@dataclass(frozen=True, eq=False)
class BoundaryFilterSet:
    """Refinement filters of the p boundary functions at one edge.

    ``H`` couples boundary functions to boundary functions, ``h`` couples them
    to interior translates m = p..3p-2 (column m-p); ``U`` and ``V`` are the
    same matrices divided by sqrt(2). ``expansion`` holds the coefficients of
    each boundary function in truncated interior translates n = -p+1..p-1 of
    the filter used for that edge (the reflected filter on the right).
    """
    side: str
    H: np.ndarray
    h: np.ndarray
    U: np.ndarray
    V: np.ndarray
    expansion: np.ndarray


def filter_coefficients(name):
    """Low-pass taps of a supported family, normalised to sum 1."""
    if name not in SUPPORTED_FAMILIES:
        raise DomainError(f"Unsupported scaling family '{name}', expected one of {', '.join(SUPPORTED_FAMILIES)}")
    if name == 'haar':
        return np.array([0.5, 0.5])
    taps = np.asarray(pywt.Wavelet(name).rec_lo, dtype=float)
    return taps / np.sum(taps)


@functools.lru_cache(maxsize=None)
def _family(name):
    taps = filter_coefficients(name)
    p = len(taps) // 2
    taps.setflags(write=False)
    return ScalingFamily(name=name, p=p, filter=taps, offset=-p + 1)


def get_family(family):
    """Accept a family name or a ScalingFamily and return the ScalingFamily."""
    if isinstance(family, ScalingFamily):
        return family
    return _family(family)


def _haar_fourier(xi):
    xi = np.asarray(xi, dtype=float)
    safe = np.where(xi == 0, 1.0, xi)
    value = (1 - np.exp(-2j * np.pi * safe)) / (2j * np.pi * safe)
    return np.where(xi == 0, 1.0 + 0j, value)


def fourier_scaling(family, xi, terms=DEFAULT_TERMS):
    """Fourier transform of the scaling function at ``xi`` (array or scalar).

    Haar uses the closed form; dbp truncates the infinite product of m0 after
    ``terms`` factors or once every factor is within 1e-16 of one.
    """
    family = get_family(family)
    if terms < 1:
        raise DomainError(f"terms must be at least 1, got {terms}")
    xi = np.asarray(xi, dtype=float)
    if family.p == 1:
        return _haar_fourier(xi)

    result = np.ones(xi.shape, dtype=complex)
    scaled = xi / 2
    for _ in range(terms):
        factor = family.m0(scaled)
        result *= factor
        if np.all(np.abs(factor - 1) < _PRODUCT_CUTOFF):
            break
        scaled = scaled / 2
    return result


def fourier_scaling_dilated(family, J, k, xi, terms=DEFAULT_TERMS):
    """Fourier transform of phi_{J,k}(x) = 2^(J/2) phi(2^J x - k)."""
    if J < 0:
        raise DomainError(f"Scale J must be nonnegative, got {J}")
    xi = np.asarray(xi, dtype=float)
    scaled = xi / 2 ** J
    return 2 ** (-J / 2) * np.exp(-2j * np.pi * k * scaled) * fourier_scaling(family, scaled, terms)


def fourier_scaling_2d(family, xi, terms=DEFAULT_TERMS):
    """Tensor-product transform; ``xi`` is a pair or an (M, 2) array."""
    xi = np.asarray(xi, dtype=float)
    return fourier_scaling(family, xi[..., 0], terms) * fourier_scaling(family, xi[..., 1], terms)


def _scaling_chain(family, xi, depth, terms):
    """phi_hat(xi / 2^l) for l = 1..depth, stacked along the first axis."""
    factors = np.stack([family.m0(xi / 2 ** j) for j in range(1, depth + terms + 2)])
    # suffix[i] = prod_{j >= i+1} m0(xi / 2^j) = phi_hat(xi / 2^i)
    suffix = np.cumprod(factors[::-1], axis=0)[::-1]
    return suffix[1:depth + 1]


def _moments(taps, offset, count):
    """Moments int x^i phi(x) dx, i < count, from the refinement relation."""
    ks = offset + np.arange(len(taps))
    filter_moments = [np.sum(taps * ks.astype(float) ** t) for t in range(count)]
    moments = np.zeros(count)
    moments[0] = 1.0
    for i in range(1, count):
        acc = sum(comb(i, r) * moments[r] * filter_moments[i - r] for r in range(i))
        moments[i] = acc / (2 ** i - 1)
    return moments


def _construct_left(taps, offset, p):
    """Boundary filters (H, h, expansion) at a left edge for the given filter."""
    scale = float(p)
    moments = _moments(taps, offset, p)
    translates = np.arange(-p + 1, p)

    # reproduction coefficients of (x/scale)^j: c_j(n) = int ((y+n)/scale)^j phi(y) dy
    def reproduction(n):
        n = np.asarray(n, dtype=float)
        return np.array([
            sum(comb(j, i) * (n / scale) ** (j - i) * moments[i] / scale ** i for i in range(j + 1))
            for j in range(p)
        ])

    coefficients = reproduction(translates)

    def tap(t):
        index = t - offset
        return taps[index] if 0 <= index < len(taps) else 0.0

    # two-scale coupling of the polynomial edge functions to phi(2x - m), m = p..3p-2
    interior = np.arange(p, 3 * p - 1)
    coupling = np.zeros((p, len(interior)))
    edge_coefficients = reproduction(np.arange(p))
    for col, m in enumerate(interior):
        for n in range(p):
            coupling[:, col] += 2 * tap(m - 2 * n) * edge_coefficients[:, n]

    exponents = np.arange(p)
    gram = 0.5 * (coupling @ coupling.T) / (1 - 2.0 ** -(exponents[:, None] + exponents[None, :] + 1))

    change = np.zeros((p, p))
    for k in range(p):
        outside = coefficients[:, translates > k]
        basis = linalg.null_space(outside.T) if outside.shape[1] else np.eye(p)
        if basis.shape[1] != k + 1:
            raise NumericalFailureError(f"Edge space with support [0, {p + k}] has dimension {basis.shape[1]}, expected {k + 1}")
        if k:
            orthogonal = linalg.null_space(change[:k] @ gram @ basis)
            if orthogonal.shape[1] != 1:
                raise NumericalFailureError(f"Could not orthogonalise boundary function {k}")
            vector = basis @ orthogonal[:, 0]
        else:
            vector = basis[:, 0]
        vector = vector / np.sqrt(vector @ gram @ vector)
        if vector @ coefficients[:, translates == k][:, 0] < 0:
            vector = -vector
        change[k] = vector

    expansion = change @ coefficients
    expansion[translates[None, :] > np.arange(p)[:, None]] = 0.0

    # change^-1 = gram @ change.T since change @ gram @ change.T = I
    H = change @ np.diag(2.0 ** -exponents) @ gram @ change.T / np.sqrt(2)
    h = change @ coupling / np.sqrt(2)
    populated = interior[None, :] <= p + 2 * np.arange(p)[:, None]
    leak = np.max(np.abs(h[~populated])) if np.any(~populated) else 0.0
    if leak > 1e-8:
        raise NumericalFailureError(f"Boundary filter leaks outside its support (max {leak:.3e})")
    h[~populated] = 0.0
    return H, h, expansion


@functools.lru_cache(maxsize=None)
def _boundary_filters(name, side):
    family = _family(name)
    p = family.p
    if p < 2:
        raise DomainError(f"Family {name} has no boundary functions (p = {p})")
    if side not in ('left', 'right'):
        raise DomainError(f"Unknown edge '{side}', expected 'left' or 'right'")
    taps = family.filter if side == 'left' else family.filter[::-1].copy()
    H, h, expansion = _construct_left(taps, family.offset, p)
    logger.debug(f"Constructed {side} boundary filters for {name}")
    for array in (H, h, expansion):
        array.setflags(write=False)
    U = H / np.sqrt(2)
    V = h / np.sqrt(2)
    U.setflags(write=False)
    V.setflags(write=False)
    return BoundaryFilterSet(side=side, H=H, h=h, U=U, V=V, expansion=expansion)


def boundary_filters(family, side):
    return _boundary_filters(get_family(family).name, side)


def _boundary_phase(family, side, xi):
    """Translation phases of the interior functions coupled to an edge."""
    p = family.p
    m = np.arange(p, 3 * p - 1)
    sign = -1.0 if side == 'left' else 1.0
    shift = m if side == 'left' else m + 1
    return np.exp(sign * 2j * np.pi * np.multiply.outer(xi, shift))


def boundary_fourier_at_zero(family, side):
    """Solve (I - U) v1(0) = V v2(0) with v2(0) = 1."""
    family = get_family(family)
    if family.p < 2:
        raise DomainError(f"Family {family.name} has no boundary functions")
    filters = boundary_filters(family, side)
    system = np.eye(family.p) - filters.U
    rhs = filters.V @ np.ones(filters.V.shape[1])
    try:
        solution = linalg.solve(system, rhs)
    except linalg.LinAlgError as e:
        raise NumericalFailureError(f"Boundary fixed point at zero is singular: {e}")
    return solution.astype(complex)


def fourier_boundary(family, side, xi, depth=DEFAULT_DEPTH, terms=DEFAULT_TERMS):
    """Fourier transforms of the p boundary functions at one edge.

    Returns an array of shape ``xi.shape + (p,)``; entry k is the transform of
    the boundary function k (k = 0 closest to the edge).
    """
    family = get_family(family)
    if depth < 1:
        raise DomainError(f"Recursion depth must be at least 1, got {depth}")
    filters = boundary_filters(family, side)
    xi = np.asarray(xi, dtype=float)
    chain = _scaling_chain(family, xi, depth, terms)

    result = np.zeros(xi.shape + (family.p,), dtype=complex)
    power = np.eye(family.p)
    for level in range(depth):
        v2 = chain[level][..., None] * _boundary_phase(family, side, xi / 2 ** (level + 1))
        result += v2 @ (power @ filters.V).T
        power = filters.U @ power
    result += power @ boundary_fourier_at_zero(family, side)
    return result
