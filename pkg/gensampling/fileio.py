# SPDX-License-Identifier: MIT

"""Readers and writers for frequency, sample, coefficient, weight and evaluation files.

Binary files start with a packed little-endian header (magic, version, dim,
count) followed by float64 data. Text files are CSV with a one-line header
and 17 significant digits, enough to round-trip every double.
"""

import json
import logging
import os

import numpy as np
from jsonschema import validate
from jsonschema.exceptions import ValidationError

from gensampling.errors import FileFormatError, ShapeError
from gensampling.wavelet_fourier import SUPPORTED_FAMILIES

logger = logging.getLogger(__name__)

VERSION = 1

FREQUENCY_MAGIC = b'GSFQ'
SAMPLE_MAGIC = b'GSSM'
COEFFICIENT_MAGIC = b'GSCF'

FORMATS = ('csv', 'binary')

_HEADER = np.dtype([('magic', 'S4'), ('version', '<u4'), ('dim', '<u4'), ('count', '<u8')])
_COEFFICIENT_HEADER = np.dtype([('magic', 'S4'), ('version', '<u4'), ('dim', '<u4'), ('family', 'u1'), ('J', '<u4')])

_TEXT_FORMAT = '%.17g'

stats_schema = {
  "$schema": "http://json-schema.org/draft-04/schema#",
  "type": "object",
  "properties": {
    "family": {"type": "string"},
    "J": {"type": "integer", "minimum": 0},
    "M": {"type": "integer", "minimum": 1},
    "weighted": {"type": "boolean"},
    "iterations": {"type": "integer", "minimum": 0},
    "residual": {"type": "number", "minimum": 0},
    "converged": {"type": "boolean"},
    "method": {"type": "string", "enum": ["cgnr", "crls"]},
    "residual_history": {"type": "array", "items": {"type": "number"}},
    "data_residual_history": {"type": "array", "items": {"type": "number"}},
    "density": {
      "type": ["object", "null"],
      "properties": {
        "delta_raw": {"type": "number"},
        "delta_scaled": {"type": "number"},
        "delta_normalized": {"type": "number"},
        "satisfies_quarter_bound": {"type": "boolean"}
      }
    }
  },
  "required": ["family", "J", "M", "iterations", "residual", "converged", "method", "residual_history"]
}


def _resolve_format(path, fmt):
    if fmt is not None:
        if fmt not in FORMATS:
            raise FileFormatError(f"Unknown file format '{fmt}', expected one of {', '.join(FORMATS)}")
        return fmt
    return 'csv' if str(path).lower().endswith('.csv') else 'binary'


def _read_bytes(path):
    try:
        with open(path, 'rb') as handle:
            return handle.read()
    except OSError as e:
        raise FileFormatError(f"Cannot read {path}: {e}")


def _write_binary(path, magic, dim, payload):
    header = np.array([(magic, VERSION, dim, payload.shape[0])], dtype=_HEADER)
    with open(path, 'wb') as handle:
        handle.write(header.tobytes())
        handle.write(np.ascontiguousarray(payload, dtype='<f8').tobytes())


def _read_binary(path, magic, data):
    if len(data) < _HEADER.itemsize:
        raise FileFormatError(f"{path} is too short for a {magic.decode()} header")
    header = np.frombuffer(data[:_HEADER.itemsize], dtype=_HEADER)[0]
    if header['magic'] != magic:
        raise FileFormatError(f"{path} has magic {header['magic']!r}, expected {magic!r}")
    if header['version'] != VERSION:
        raise FileFormatError(f"{path} has unsupported version {header['version']}")
    body = data[_HEADER.itemsize:]
    if len(body) % 8:
        raise FileFormatError(f"{path} has a truncated payload")
    return int(header['dim']), int(header['count']), np.frombuffer(body, dtype='<f8')


def _read_csv(path, expected_headers):
    try:
        with open(path) as handle:
            header = handle.readline().strip()
            if header not in expected_headers:
                raise FileFormatError(f"{path} has header '{header}', expected one of {expected_headers}")
            table = np.loadtxt(handle, delimiter=',', ndmin=2)
    except FileFormatError:
        raise
    except OSError as e:
        raise FileFormatError(f"Cannot read {path}: {e}")
    except ValueError as e:
        raise FileFormatError(f"{path} is not a valid CSV table: {e}")
    return header, table


def _write_csv(path, header, table):
    np.savetxt(path, table, fmt=_TEXT_FORMAT, delimiter=',', header=header, comments='')


def write_frequencies(path, points, fmt=None):
    points = np.asarray(points, dtype=float)
    table = points[:, None] if points.ndim == 1 else points
    if table.ndim != 2 or table.shape[1] not in (1, 2):
        raise ShapeError(f"Frequencies must have shape (M,) or (M, 2), got {points.shape}")
    if _resolve_format(path, fmt) == 'csv':
        _write_csv(path, 'xi_x' if table.shape[1] == 1 else 'xi_x,xi_y', table)
    else:
        _write_binary(path, FREQUENCY_MAGIC, table.shape[1], table)
    logger.info(f"Wrote {table.shape[0]} frequencies to {path}")


def read_frequencies(path):
    """Frequencies as an (M,) or (M, 2) array; the format is detected from the magic."""
    data = _read_bytes(path)
    if data[:4] == FREQUENCY_MAGIC:
        dim, count, values = _read_binary(path, FREQUENCY_MAGIC, data)
        if dim not in (1, 2) or values.shape[0] != dim * count:
            raise FileFormatError(f"{path} declares {count} points of dim {dim} but holds {values.shape[0]} values")
        table = values.reshape(count, dim)
    else:
        header, table = _read_csv(path, ('xi_x', 'xi_x,xi_y'))
        if table.shape[1] != header.count(',') + 1:
            raise FileFormatError(f"{path} rows do not match header '{header}'")
    if table.shape[0] < 1:
        raise FileFormatError(f"{path} holds no frequencies")
    return table[:, 0].copy() if table.shape[1] == 1 else table.copy()


def write_samples(path, values, fmt=None):
    values = np.asarray(values, dtype=complex)
    if values.ndim != 1:
        raise ShapeError(f"Samples must be a 1D array, got shape {values.shape}")
    table = np.stack([values.real, values.imag], axis=1)
    if _resolve_format(path, fmt) == 'csv':
        _write_csv(path, 're,im', table)
    else:
        _write_binary(path, SAMPLE_MAGIC, 1, table)
    logger.info(f"Wrote {values.shape[0]} samples to {path}")


def read_samples(path):
    data = _read_bytes(path)
    if data[:4] == SAMPLE_MAGIC:
        _, count, values = _read_binary(path, SAMPLE_MAGIC, data)
        if values.shape[0] != 2 * count:
            raise FileFormatError(f"{path} declares {count} samples but holds {values.shape[0]} values")
        table = values.reshape(count, 2)
    else:
        _, table = _read_csv(path, ('re,im',))
        if table.shape[1] != 2:
            raise FileFormatError(f"{path} rows must hold exactly re,im")
    return table[:, 0] + 1j * table[:, 1]


def write_coefficients(path, coeffs, family, J):
    """Binary coefficient file; 2D grids are stored column-stacked."""
    coeffs = np.asarray(coeffs, dtype=complex)
    N = 2 ** J
    if coeffs.shape not in ((N,), (N, N)):
        raise ShapeError(f"Coefficients of shape {coeffs.shape} do not match J={J}")
    tag = 0 if family == 'haar' else int(family[2:])
    header = np.array([(COEFFICIENT_MAGIC, VERSION, coeffs.ndim, tag, J)], dtype=_COEFFICIENT_HEADER)
    flat = coeffs.ravel(order='F')
    with open(path, 'wb') as handle:
        handle.write(header.tobytes())
        handle.write(np.stack([flat.real, flat.imag], axis=1).astype('<f8').tobytes())
    logger.info(f"Wrote {flat.shape[0]} coefficients ({family}, J={J}) to {path}")


def read_coefficients(path):
    """Returns ``(coeffs, family, J)``."""
    data = _read_bytes(path)
    size = _COEFFICIENT_HEADER.itemsize
    if len(data) < size or data[:4] != COEFFICIENT_MAGIC:
        raise FileFormatError(f"{path} is not a coefficient file")
    header = np.frombuffer(data[:size], dtype=_COEFFICIENT_HEADER)[0]
    if header['version'] != VERSION:
        raise FileFormatError(f"{path} has unsupported version {header['version']}")
    dim, tag, J = int(header['dim']), int(header['family']), int(header['J'])
    family = 'haar' if tag == 0 else f'db{tag}'
    if dim not in (1, 2) or family not in SUPPORTED_FAMILIES:
        raise FileFormatError(f"{path} has invalid dim {dim} or family tag {tag}")
    body = data[size:]
    expected = (2 ** J) ** dim
    if len(body) != 16 * expected:
        raise FileFormatError(f"{path} should hold {expected} complex values")
    values = np.frombuffer(body, dtype='<f8').reshape(expected, 2)
    flat = values[:, 0] + 1j * values[:, 1]
    coeffs = flat if dim == 1 else flat.reshape((2 ** J, 2 ** J), order='F')
    return coeffs, family, J


def write_weights(path, mu):
    mu = np.asarray(mu, dtype=float)
    _write_csv(path, 'mu', mu[:, None])
    logger.info(f"Wrote {mu.shape[0]} weights to {path}")


def read_weights(path):
    _, table = _read_csv(path, ('mu',))
    if table.shape[1] != 1:
        raise FileFormatError(f"{path} rows must hold a single weight")
    return table[:, 0].copy()


def write_pgm(path, values):
    """16-bit binary PGM; rows are y, columns x; min/max go in the comment line."""
    values = np.asarray(values, dtype=float)
    low, high = float(np.min(values)), float(np.max(values))
    span = high - low
    scaled = np.zeros(values.shape) if span == 0 else (values - low) / span * 65535
    raster = np.rint(scaled).astype('>u2').T
    header = f"P5\n# min={low!r} max={high!r}\n{raster.shape[1]} {raster.shape[0]}\n65535\n"
    with open(path, 'wb') as handle:
        handle.write(header.encode('ascii'))
        handle.write(raster.tobytes())


def read_pgm(path):
    """Raster written by write_pgm, mapped back to [min, max] and indexed [x, y]."""
    data = _read_bytes(path)
    lines = data.split(b'\n', 4)
    if len(lines) < 5 or lines[0] != b'P5' or not lines[1].startswith(b'# min='):
        raise FileFormatError(f"{path} is not a PGM written by gs")
    try:
        fields = dict(item.split('=') for item in lines[1][2:].decode('ascii').split())
        low, high = float(fields['min']), float(fields['max'])
        width, height = (int(v) for v in lines[2].split())
    except (KeyError, ValueError) as e:
        raise FileFormatError(f"{path} has a malformed PGM header: {e}")
    raster = np.frombuffer(lines[4], dtype='>u2')
    if raster.shape[0] != width * height:
        raise FileFormatError(f"{path} raster does not match {width}x{height}")
    return (low + raster.reshape(height, width).astype(float) / 65535 * (high - low)).T


def write_evaluation(path, evaluation):
    """CSV ``x,value`` for 1D evaluations, 16-bit PGM for 2D rasters."""
    if evaluation.dim == 1:
        _write_csv(path, 'x,value', np.stack([evaluation.x, evaluation.values], axis=1))
    else:
        write_pgm(path, evaluation.values)
    logger.info(f"Wrote {evaluation.dim}D evaluation at resolution {evaluation.R} to {path}")


def read_evaluation_csv(path):
    _, table = _read_csv(path, ('x,value',))
    return table[:, 0].copy(), table[:, 1].copy()


def write_stats(path, stats):
    try:
        validate(instance=stats, schema=stats_schema)
    except ValidationError as e:
        raise FileFormatError(f"Solve statistics do not match the sidecar schema: {e.message}")
    with open(path, 'w') as handle:
        json.dump(stats, handle, indent=2)
    logger.debug(f"Wrote solve statistics to {path}")


def read_stats(path):
    if not os.path.exists(path):
        raise FileFormatError(f"Stats file {path} does not exist")
    try:
        with open(path) as handle:
            stats = json.load(handle)
        validate(instance=stats, schema=stats_schema)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"{path} is not valid JSON: {e}")
    except ValidationError as e:
        raise FileFormatError(f"{path} is not a valid stats sidecar: {e.message}")
    return stats


def stats_path(coefficient_path):
    return f"{os.path.splitext(coefficient_path)[0]}.stats.json"
