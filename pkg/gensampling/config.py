# SPDX-License-Identifier: MIT

import copy
import json
import logging
import os

from jsonschema import validate
from jsonschema.exceptions import ValidationError

from gensampling.errors import FileFormatError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'gs.json')

DEFAULT_CONTEXT = {
    "family": "db4",
    "fourier": {"terms": 48, "depth": 30},
    "nfft": {"sigma": 2.0, "half_width": 6, "kernel": "kaiser_bessel"},
    "solver": {"method": "cgnr", "tolerance": 1e-10, "max_iterations_factor": 2},
    "densify_cap": 2 ** 24,
    "bench": {"warmup": 1, "repeats": 5, "report": "bench_report.csv"},
}

config_schema = {
  "$schema": "http://json-schema.org/draft-04/schema#",
  "type": "object",
  "properties": {
    "app": {"type": "string"},
    "context": {
      "type": "object",
      "properties": {
        "family": {"type": "string", "enum": ["haar", "db2", "db3", "db4", "db5", "db6", "db7", "db8"]},
        "fourier": {
          "type": "object",
          "properties": {
            "terms": {"type": "integer", "minimum": 1},
            "depth": {"type": "integer", "minimum": 1}
          }
        },
        "nfft": {
          "type": "object",
          "properties": {
            "sigma": {"type": "number", "minimum": 1.25},
            "half_width": {"type": "integer", "minimum": 2},
            "kernel": {"type": "string", "enum": ["kaiser_bessel", "gaussian"]}
          }
        },
        "solver": {
          "type": "object",
          "properties": {
            "method": {"type": "string", "enum": ["cgnr", "crls"]},
            "tolerance": {"type": "number", "minimum": 0, "exclusiveMinimum": True},
            "max_iterations_factor": {"type": "integer", "minimum": 1}
          }
        },
        "densify_cap": {"type": "integer", "minimum": 1},
        "bench": {
          "type": "object",
          "properties": {
            "warmup": {"type": "integer", "minimum": 0},
            "repeats": {"type": "integer", "minimum": 1},
            "report": {"type": "string"}
          }
        }
      }
    }
  },
  "required": ["context"]
}


def _merge(base, override):
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path=None):
    """Load the ``context`` block of a gs.json file merged over the defaults.

    The file is looked up as ``path``, then ``$GS_CONFIG``, then the gs.json
    next to the package. A missing default file is not an error.
    """
    explicit = path or os.environ.get('GS_CONFIG')
    config_path = explicit or DEFAULT_CONFIG_PATH
    if not os.path.exists(config_path):
        if explicit:
            raise FileFormatError(f"Config file {config_path} does not exist")
        logger.debug("No gs.json found, using built-in defaults")
        return copy.deepcopy(DEFAULT_CONTEXT)

    try:
        with open(config_path) as handle:
            document = json.load(handle)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"Config file {config_path} is not valid JSON: {e}")
    try:
        validate(instance=document, schema=config_schema)
    except ValidationError as e:
        raise FileFormatError(f"Config file {config_path} is invalid: {e.message}")

    logger.debug(f"Loaded config from {config_path}")
    return _merge(DEFAULT_CONTEXT, document['context'])
