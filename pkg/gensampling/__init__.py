# SPDX-License-Identifier: MIT

"""Generalized sampling: wavelet coefficients from nonuniform Fourier samples."""

from gensampling.errors import (DegenerateInputError, DomainError, FileFormatError, GeneralizedSamplingError,
                                NumericalFailureError, ParameterError, ShapeError, UsageError)
from gensampling.operator import Freq2WaveOp, apply_adjoint, apply_forward, densify, freq2wave
from gensampling.solver import SolveOptions, SolveStats, dense_lsq_oracle, solve_least_squares
from gensampling.weights import density, voronoi_weights, voronoi_weights_1d, voronoi_weights_2d
