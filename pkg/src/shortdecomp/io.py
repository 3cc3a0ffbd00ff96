"""JSON schemas for problem files and canonical output.

Complex numbers are ``[re, im]`` pairs; plain numbers are accepted as real.
Matrices are ``{"n": n, "data": [...]}`` in row-major order, subspaces
``{"ambient": n, "k": k, "basis": [...]}`` in column-major order.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .charges import Charge, SetRing
from .errors import SchemaError
from .functionals import Functional, StarAlgebra
from .linalg import Subspace


def load_json(path) -> object:
    try:
        with open(Path(path), encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None


def _require(doc, keys, what):
    if not isinstance(doc, dict):
        raise SchemaError(f"{what}: expected a JSON object")
    missing = [k for k in keys if k not in doc]
    if missing:
        raise SchemaError(f"{what}: missing key(s) {', '.join(missing)}")


def _complex(x, what) -> complex:
    if isinstance(x, bool):
        raise SchemaError(f"{what}: expected a number or [re, im]")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise SchemaError(f"{what}: expected a number or [re, im], got {x!r}")


def _complex_array(items, what) -> np.ndarray:
    if not isinstance(items, list):
        raise SchemaError(f"{what}: expected a list")
    return np.array([_complex(x, what) for x in items], dtype=complex)


def _count(doc, key, what, minimum=0) -> int:
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise SchemaError(f"{what}: '{key}' must be an integer >= {minimum}")
    return v


def parse_matrix(doc, what="matrix") -> np.ndarray:
    _require(doc, ("n", "data"), what)
    n = _count(doc, "n", what, 1)
    data = _complex_array(doc["data"], what)
    if data.size != n * n:
        raise SchemaError(f"{what}: expected {n * n} entries, got {data.size}")
    return data.reshape(n, n)


def parse_subspace(doc, what="subspace") -> Subspace:
    _require(doc, ("ambient", "k", "basis"), what)
    n = _count(doc, "ambient", what, 1)
    k = _count(doc, "k", what)
    data = _complex_array(doc["basis"], what)
    if k > n or data.size != n * k:
        raise SchemaError(f"{what}: expected {n * k} basis entries for k={k} <= n={n}, got {data.size}")
    return Subspace(data.reshape(k, n).T)


def parse_ring(doc, what="ring") -> SetRing:
    _require(doc, ("universe", "members"), what)
    if not isinstance(doc["members"], list):
        raise SchemaError(f"{what}: 'members' must be a list of integer bitmasks")
    return SetRing(_count(doc, "universe", what, 1), tuple(doc["members"]))


def parse_charge(doc, what="charge") -> Charge:
    _require(doc, ("ring", "values"), what)
    ring = parse_ring(doc["ring"], f"{what}.ring")
    vals = doc["values"]
    if not isinstance(vals, list) or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in vals):
        raise SchemaError(f"{what}: 'values' must be a list of real numbers")
    return Charge(ring, tuple(float(v) for v in vals))


def parse_algebra(doc, what="algebra") -> StarAlgebra:
    if isinstance(doc, dict) and "fixture" in doc:
        _require(doc, ("fixture", "param"), what)
        return StarAlgebra.fixture(doc["fixture"], _count(doc, "param", what, 1))
    _require(doc, ("dim", "structure", "involution"), what)
    d = _count(doc, "dim", what, 1)
    try:
        c = np.array([[[_complex(x, what) for x in row] for row in plane] for plane in doc["structure"]])
    except TypeError:
        raise SchemaError(f"{what}: 'structure' must be a d x d x d nested list") from None
    inv = _complex_array(doc["involution"], what)
    if c.shape != (d, d, d) or inv.size != d * d:
        raise SchemaError(f"{what}: shapes do not match dim={d}")
    return StarAlgebra(c, inv.reshape(d, d))


def parse_functional(doc, algebra: StarAlgebra | None = None, what="functional") -> Functional:
    _require(doc, ("coeffs",), what)
    if "algebra" in doc:
        algebra = parse_algebra(doc["algebra"], f"{what}.algebra")
    if algebra is None:
        raise SchemaError(f"{what}: no algebra given (embed 'algebra' or pass --algebra)")
    return Functional(algebra, _complex_array(doc["coeffs"], what))


# Output side.

def _cpair(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def matrix_doc(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"n": int(M.shape[0]), "data": [_cpair(z) for z in M.reshape(-1)]}


def subspace_doc(S: Subspace) -> dict:
    return {"ambient": S.ambient_dim, "k": S.k, "basis": [_cpair(z) for z in S.basis.T.reshape(-1)]}


def ring_doc(ring: SetRing) -> dict:
    return {"universe": ring.universe_size, "members": list(ring.members)}


def charge_doc(c: Charge) -> dict:
    return {"ring": ring_doc(c.ring), "values": list(c.values)}


def functional_doc(f: Functional) -> dict:
    return {"coeffs": [_cpair(z) for z in f.coeffs]}


def _number(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    if x == 0:
        return "0"
    return format(x, ".17g")


def canonical_json(obj, indent: int = 2) -> str:
    """JSON with sorted keys and floats at 17 significant digits.

    The stdlib encoder always prints the shortest round-trip form of a float,
    so scalars are formatted here and containers are laid out by hand.
    """

    def emit(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {emit(o[k], level + 1)}" for k in sorted(o, key=str)]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list, tuple)) for v in o):
                return "[" + ", ".join(emit(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + emit(v, level + 1) for v in o) + "\n" + end + "]"
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _number(float(o))
        if isinstance(o, str):
            return json.dumps(o)
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return emit(obj, 0) + "\n"


def text_report(obj, prefix: str = "") -> str:
    """Flat ``key.path = value`` lines; matrices appear as nested lists."""
    lines = []

    def walk(o, path):
        if isinstance(o, dict):
            for k in sorted(o, key=str):
                walk(o[k], f"{path}.{k}" if path else str(k))
        else:
            lines.append(f"{path} = {canonical_json(o, indent=0).strip().replace(chr(10), ' ')}")

    walk(obj, prefix)
    return "\n".join(lines) + "\n"
