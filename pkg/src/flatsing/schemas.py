"""JSON layouts for command-line input, checked with :mod:`jsonschema`."""

import jsonschema

from .errors import SchemaError

COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

SERIES = {
    "type": "object",
    "required": ["coeffs"],
    "properties": {
        "valuation": {"type": "integer"},
        "order": {"type": "integer"},
        "coeffs": {"type": "array", "items": COMPLEX},
    },
}

DEVMAP = {
    "type": "object",
    "required": ["alpha", "psi"],
    "properties": {
        "alpha": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "c": COMPLEX,
        "psi": SERIES,
    },
}

DENSITY = {
    "type": "object",
    "required": ["a", "G"],
    "properties": {"a": {"type": "number"}, "G": SERIES},
}

FORM = {
    "type": "object",
    "required": ["form"],
    "properties": {
        "form": {"enum": ["conical", "cylindrical", "log_pole"]},
        "beta": {"type": "number"},
        "c": {"type": "number", "exclusiveMinimum": 0},
        "nu": {"type": "number", "exclusiveMinimum": 0},
        "n": {"type": "integer", "minimum": 1},
    },
    "allOf": [
        {"if": {"properties": {"form": {"const": "conical"}}}, "then": {"required": ["beta"]}},
        {"if": {"properties": {"form": {"const": "cylindrical"}}}, "then": {"required": ["c"]}},
        {"if": {"properties": {"form": {"const": "log_pole"}}}, "then": {"required": ["nu", "n"]}},
    ],
}

ELEMENT = {
    "type": "object",
    "required": ["family"],
    "properties": {
        "family": {"enum": ["M1_generic", "M1_integer", "M2", "M3"]},
        "lambda": COMPLEX,
        "zeta": COMPLEX,
        "p": COMPLEX,
        "ek_index": {"type": "integer", "minimum": 0},
        "a": COMPLEX,
    },
}

COMPOSE_JOB = {
    "type": "object",
    "required": ["form", "g1", "g2"],
    "properties": {"form": FORM, "g1": ELEMENT, "g2": ELEMENT},
}

VERIFY_JOB = {
    "type": "object",
    "required": ["form", "element"],
    "properties": {"form": FORM, "element": ELEMENT},
}


def validate(obj, schema):
    """Raise :class:`SchemaError` naming the offending field path."""
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema).iter_errors(obj))
    if err is not None:
        path = "/".join(str(p) for p in err.absolute_path)
        raise SchemaError(err.message, path=path)
