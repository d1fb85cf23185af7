"""JSON encodings of exact scalars and matrices.

Rationals are decimal strings "p/q" ("p" when q = 1), quadratic scalars are
"a+b*sqrt(d)", Witt scalars are {"p","s","N","coeffs"}.  Matrices are
row-major nested arrays.
"""

from __future__ import annotations

from gmpy2 import mpq

from .errors import InvalidInput
from .scalars import QuadScalar, Rat, WittRing, WittScalar, quad_from_str, rat, rat_str, witt_from_json


def scalar_to_json(x):
    if isinstance(x, WittScalar):
        return x.to_json()
    if isinstance(x, QuadScalar):
        return str(x)
    if isinstance(x, (Rat, int)):
        return rat_str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def vector_to_json(v) -> list:
    return [scalar_to_json(x) for x in v]


def matrix_to_json(M) -> list:
    return [vector_to_json(row) for row in M]


def _quad_d(text: str) -> int | None:
    if "sqrt(" not in text:
        return None
    return int(text.split("sqrt(")[1].rstrip(")"))


def parse_scalar(x, d: int | None = None):
    if isinstance(x, bool):
        raise InvalidInput("booleans are not scalars")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, str):
        dd = _quad_d(x)
        if dd is not None:
            return quad_from_str(x, dd)
        return rat(x)
    raise InvalidInput(f"cannot read scalar {x!r}")


def parse_matrix(obj, rows: int | None = None, cols: int | None = None) -> list:
    """Exact matrix from nested arrays; QuadScalar when any entry carries sqrt(d)."""
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise InvalidInput("a matrix is a list of rows")
    if rows is not None and len(obj) != rows:
        raise InvalidInput(f"expected {rows} rows, got {len(obj)}")
    M = [[parse_scalar(x) for x in row] for row in obj]
    if cols is not None and any(len(r) != cols for r in M):
        raise InvalidInput(f"expected {cols} columns")
    ds = {x.d for row in M for x in row if isinstance(x, QuadScalar)}
    if len(ds) > 1:
        raise InvalidInput("entries from different quadratic fields")
    if ds:
        d = ds.pop()
        M = [[x if isinstance(x, QuadScalar) else QuadScalar(d, x) for x in row] for row in M]
    return M


def parse_vector(obj, length: int | None = None) -> list:
    if not isinstance(obj, list):
        raise InvalidInput("a vector is a list")
    if length is not None and len(obj) != length:
        raise InvalidInput(f"expected {length} entries")
    return [parse_scalar(x) for x in obj]


def parse_witt_matrix(obj, ring: WittRing, rows: int, cols: int) -> list:
    """Witt matrix given as nested arrays or as a flat list of rows*cols scalars."""
    if isinstance(obj, list) and len(obj) == rows * cols and not isinstance(obj[0], list):
        obj = [obj[i * cols : (i + 1) * cols] for i in range(rows)]
    if not isinstance(obj, list) or len(obj) != rows or any(len(r) != cols for r in obj):
        raise InvalidInput(f"expected a {rows}x{cols} Witt matrix")
    return [[witt_from_json(x, ring) for x in row] for row in obj]
