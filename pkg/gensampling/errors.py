# SPDX-License-Identifier: MIT

"""Exception hierarchy shared by the library and the ``gs`` command line.

Each class carries the process exit code the CLI returns for it.
"""


class GeneralizedSamplingError(Exception):
    exit_code = 1


class UsageError(GeneralizedSamplingError, ValueError):
    exit_code = 2


class FileFormatError(GeneralizedSamplingError, ValueError):
    exit_code = 3


class ShapeError(GeneralizedSamplingError, ValueError):
    exit_code = 4


class DomainError(GeneralizedSamplingError, ValueError):
    """Precondition violation: unsupported family, scale, band or region."""
    exit_code = 5


class ParameterError(DomainError):
    pass


class DegenerateInputError(DomainError):
    pass


class NumericalFailureError(GeneralizedSamplingError, ArithmeticError):
    exit_code = 6
