"""JSON encoding of points, tensors, problem specs and results.

Complex numbers are stored as [re, im] pairs, hyperboloid points as ambient
coordinates and tensors as {"shape": [...], "data": [[re, im], ...]} in
row-major order.
"""

from __future__ import annotations

import json

import jsonschema
import numpy as np

from .manifolds import Euclidean, Hyperboloid, PDHermitian, Product, manifold_from_dict

_NUMBER = {"type": "number"}
_MANIFOLD = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["euclidean", "hyperboloid", "pd_hermitian", "product"]},
        "n": {"type": "integer", "minimum": 1},
        "kappa": {"type": "number", "exclusiveMinimum": 0},
        "traceless": {"type": "boolean"},
        "factors": {"type": "array"},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

PROBLEM_SCHEMA = {
    "type": "object",
    "properties": {
        "problem": {"enum": ["meb", "median", "barycenter", "scaling", "check", "gen"]},
        "manifold": _MANIFOLD,
        "points": {"type": "array"},
        "tensor": {
            "type": "object",
            "properties": {
                "shape": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
                "data": {"type": "array", "items": {"type": "array", "items": _NUMBER,
                                                    "minItems": 2, "maxItems": 2}},
            },
            "required": ["shape", "data"],
            "additionalProperties": False,
        },
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "kappa": {"type": "number", "exclusiveMinimum": 0},
        "S0": {"type": "number", "exclusiveMinimum": 0},
        "R0": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer"},
        "adaptive": {"type": "boolean"},
        "traceless": {"type": "boolean"},
        "weight_norm": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 1},
        "damped_max_iter": {"type": "integer", "minimum": 1},
        "suite": {"type": "string"},
        "trials": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "spread": {"type": "number", "minimum": 0},
        "gen_problem": {"enum": ["meb", "median", "barycenter", "scaling"]},
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 1}},
    },
    "required": ["problem"],
    "additionalProperties": False,
}

DEFAULTS = {"epsilon": 1e-6, "adaptive": False, "traceless": False, "max_iter": 10_000_000,
            "damped_max_iter": 100_000, "seed": 0, "trials": 100}


def validate_spec(spec):
    """Raise jsonschema.ValidationError when a problem file does not match the schema."""
    jsonschema.validate(spec, PROBLEM_SCHEMA)
    return spec


def encode_complex_matrix(a):
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_complex_matrix(obj):
    arr = np.asarray(obj, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("complex matrix must be nested [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_point(manifold, p):
    if isinstance(manifold, PDHermitian):
        return encode_complex_matrix(p)
    if isinstance(manifold, (Hyperboloid, Euclidean)):
        return [float(x) for x in np.asarray(p, dtype=float)]
    if isinstance(manifold, Product):
        return [encode_point(f, pi) for f, pi in zip(manifold.factors, p)]
    raise ValueError(f"cannot encode points of {manifold!r}")


def decode_point(manifold, obj):
    if isinstance(manifold, PDHermitian):
        p = decode_complex_matrix(obj)
    elif isinstance(manifold, (Hyperboloid, Euclidean)):
        p = np.asarray(obj, dtype=float)
    elif isinstance(manifold, Product):
        return tuple(decode_point(f, o) for f, o in zip(manifold.factors, obj))
    else:
        raise ValueError(f"cannot decode points of {manifold!r}")
    manifold.check_point(p)
    return p


def encode_tensor(v):
    v = np.asarray(v, dtype=complex)
    return {"shape": list(v.shape), "data": [[float(z.real), float(z.imag)] for z in v.reshape(-1)]}


def decode_tensor(obj):
    shape = tuple(int(s) for s in obj["shape"])
    data = np.asarray(obj["data"], dtype=float).reshape(-1, 2)
    if data.shape[0] != int(np.prod(shape)):
        raise ValueError("tensor data length does not match its shape")
    return (data[:, 0] + 1j * data[:, 1]).reshape(shape)


def manifold_of(spec):
    m = spec.get("manifold")
    if m is None:
        raise ValueError("spec needs a manifold descriptor")
    d = dict(m)
    if "kappa" in spec and d.get("kind") == "hyperboloid":
        d["kappa"] = spec["kappa"]
    return manifold_from_dict(d)


def dumps(obj):
    """Deterministic JSON (sorted keys, LF line ending)."""
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


__all__ = [
    "PROBLEM_SCHEMA", "DEFAULTS", "validate_spec", "encode_point", "decode_point",
    "encode_tensor", "decode_tensor", "encode_complex_matrix", "decode_complex_matrix",
    "manifold_of", "dumps",
]
