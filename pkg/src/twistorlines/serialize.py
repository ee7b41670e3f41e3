"""JSON encoding of matrices, representations, lines, points and paths.

Matrix schema: {"rows": R, "cols": C, "domain": "exact"|"float", "entries": [...]}
with row-major entries; exact entries are rational strings such as "-3/4",
complex entries are two-element arrays [re, im].
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import linalg as la
from .lines import LinePoint, TwistorLine
from .reps import AlgebraRep


class MalformedInput(ValueError):
    """Input JSON that does not follow the schema."""


def scalar_to_json(x):
    if isinstance(x, la.CRational):
        return [str(x.re), str(x.im)]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def _scalar_from_json(v, exact_domain: bool):
    if isinstance(v, list):
        if len(v) != 2:
            raise MalformedInput("complex entries must be [re, im]")
        re, im = (_scalar_from_json(t, exact_domain) for t in v)
        return la.CRational(re, im) if exact_domain else complex(re, im)
    if exact_domain:
        if isinstance(v, bool) or not isinstance(v, (str, int)):
            raise MalformedInput(f"exact entries must be rational strings, got {v!r}")
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(f"bad rational {v!r}") from exc
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise MalformedInput(f"float entries must be numbers, got {v!r}")
    try:
        return float(Fraction(v)) if isinstance(v, str) else float(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"bad number {v!r}") from exc


def matrix_to_json(a) -> dict:
    a = np.asarray(a)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "domain": "exact" if la.is_exact(a) else "float",
        "entries": [scalar_to_json(x) for x in a.flat],
    }


def matrix_from_json(d) -> np.ndarray:
    if not isinstance(d, dict):
        raise MalformedInput("a matrix must be a JSON object")
    try:
        rows, cols, domain, entries = d["rows"], d["cols"], d["domain"], d["entries"]
    except KeyError as exc:
        raise MalformedInput(f"matrix is missing field {exc}") from exc
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise MalformedInput("rows and cols must be positive integers")
    if domain not in ("exact", "float"):
        raise MalformedInput("domain must be 'exact' or 'float'")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise MalformedInput(f"expected {rows * cols} entries")
    ex = domain == "exact"
    vals = [_scalar_from_json(v, ex) for v in entries]
    if ex:
        out = np.empty(rows * cols, dtype=object)
        out[:] = vals
        return out.reshape(rows, cols)
    dtype = complex if any(isinstance(v, complex) for v in vals) else float
    return np.array(vals, dtype=dtype).reshape(rows, cols)


def rep_to_json(rep: AlgebraRep) -> dict:
    out = {"epsilon": rep.epsilon, "n": rep.n}
    if rep.k is not None:
        out["k"] = rep.k
    out["I"] = matrix_to_json(rep.I)
    out["B"] = matrix_to_json(rep.B)
    if rep.b_square != rep.epsilon:
        out["b_square"] = scalar_to_json(rep.b_square)
    return out


def rep_from_json(d) -> AlgebraRep:
    if not isinstance(d, dict):
        raise MalformedInput("a representation must be a JSON object")
    try:
        eps, n = d["epsilon"], d["n"]
        I, B = matrix_from_json(d["I"]), matrix_from_json(d["B"])
    except KeyError as exc:
        raise MalformedInput(f"representation is missing field {exc}") from exc
    if eps not in (-1, 0, 1) or not isinstance(n, int) or n < 1:
        raise MalformedInput("epsilon must be -1, 0 or 1 and n a positive integer")
    if I.shape != (4 * n, 4 * n) or B.shape != I.shape:
        raise MalformedInput(f"generators must be {4 * n} x {4 * n}")
    if la.is_exact(I) != la.is_exact(B):
        raise MalformedInput("generators must share a domain")
    c = d.get("b_square")
    if c is not None:
        c = _scalar_from_json(c, la.is_exact(I))
    return AlgebraRep(eps, n, I, B, d.get("k"), c)


def line_to_json(line: TwistorLine) -> dict:
    return {"rep": rep_to_json(line.rep), "type": line.type}


def line_from_json(d) -> TwistorLine:
    if not isinstance(d, dict) or "rep" not in d:
        raise MalformedInput("a line must be an object with a 'rep' field")
    return TwistorLine(rep_from_json(d["rep"]))


def point_to_json(p: LinePoint) -> dict:
    return {"coords": [scalar_to_json(c) for c in p.coords]}


def path_to_json(path) -> dict:
    segs = []
    for seg in path.segments:
        segs.append(
            {
                "line": line_to_json(seg.line),
                "from": point_to_json(seg.start),
                "to": point_to_json(seg.end),
                "component": seg.component,
            }
        )
    return {"segments": segs, "junction_residuals": [float(r) for r in path.junction_residuals]}
