"""JSON files for tuples and reports, plus CSV export of spectra.

Tuple file layout::

    {"dim": d, "n": n, "operators": [{"rows": d, "cols": d,
      "entries": [[re, im], ...]}, ...]}

Entries are row-major. Canonical output is one line of JSON with a trailing
newline; floats use Python's shortest round-trip ``repr`` so a save/load
cycle reproduces every entry bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, ParseError
from .transforms import OperatorTuple, validate_commuting


def matrix_to_dict(a) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def tuple_to_dict(operators) -> dict:
    ops = list(operators)
    return {
        "dim": int(ops[0].shape[0]),
        "n": len(ops),
        "operators": [matrix_to_dict(t) for t in ops],
    }


def dumps_tuple(operators) -> str:
    return json.dumps(tuple_to_dict(operators), allow_nan=False) + "\n"


def save_tuple(operators, path) -> None:
    """Write ``operators`` in canonical form. Commutativity is not required here."""
    Path(path).write_text(dumps_tuple(operators), encoding="utf-8")


def _matrix_from_dict(obj, index: int) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError(f"operator {index}: expected an object")
    try:
        rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
    except KeyError as exc:
        raise ParseError(f"operator {index}: missing field {exc.args[0]!r}") from None
    if not (isinstance(rows, int) and isinstance(cols, int) and rows >= 1 and cols >= 1):
        raise ParseError(f"operator {index}: rows and cols must be positive integers")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise ParseError(f"operator {index}: expected {rows * cols} entries, got {got}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for j, pair in enumerate(entries):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise ParseError(f"operator {index}: entry {j} is not a [re, im] pair of numbers")
        if not all(math.isfinite(x) for x in pair):
            raise ParseError(f"operator {index}: entry {j} is not finite")
        out[j] = complex(pair[0], pair[1])
    return out.reshape(rows, cols)


def parse_operators(text: str) -> list[np.ndarray]:
    """Parse a tuple document into matrices without checking commutativity."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or "operators" not in doc:
        raise ParseError("expected an object with an 'operators' list")
    ops_raw = doc["operators"]
    if not isinstance(ops_raw, list) or not ops_raw:
        raise ParseError("'operators' must be a nonempty list")
    ops = [_matrix_from_dict(o, i) for i, o in enumerate(ops_raw)]
    n = doc.get("n", len(ops))
    if n != len(ops):
        raise DimensionMismatch(f"header says n = {n} but {len(ops)} operators are present")
    d = doc.get("dim", ops[0].shape[0])
    for i, t in enumerate(ops):
        if t.shape != (d, d):
            raise DimensionMismatch(f"operator {i} has shape {t.shape}; header dim is {d}")
    return ops


def load_operators(path) -> list[np.ndarray]:
    return parse_operators(Path(path).read_text(encoding="utf-8"))


def load_tuple(path, ctol: float | None = None) -> OperatorTuple:
    """Read and validate a commuting tuple (``NotCommuting`` reports the defect)."""
    return validate_commuting(load_operators(path), ctol)


def save_report(report: dict, path) -> None:
    Path(path).write_text(dumps_report(report), encoding="utf-8")


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True) + "\n"


def load_report(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid report JSON: {exc.msg}", exc.lineno, exc.colno) from None


def spectrum_to_dict(spec) -> dict:
    out = {
        "points": [[[z.real, z.imag] for z in p] for p in spec.points],
        "multiplicities": list(spec.multiplicities),
        "polydisc_radii": list(spec.polydisc_radii),
    }
    if spec.homology_profiles is not None:
        out["homology"] = [list(h.dims) for h in spec.homology_profiles]
    return out


def spectrum_to_csv(spec) -> str:
    n = spec.n
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["index", "multiplicity"]
    for i in range(n):
        header += [f"re_{i + 1}", f"im_{i + 1}"]
    if spec.homology_profiles is not None:
        header += [f"h_{k}" for k in range(n + 1)]
    w.writerow(header)
    for j, p in enumerate(spec.points):
        row = [j, spec.multiplicities[j]]
        for z in p:
            row += [repr(z.real), repr(z.imag)]
        if spec.homology_profiles is not None:
            row += list(spec.homology_profiles[j].dims)
        w.writerow(row)
    return buf.getvalue()
