"""JSON matrix documents: ``{"order": n, "entries": [[[w, x, y, z], ...], ...], "metadata": {...}}``.

Floats are written with Python's shortest round-trip repr and keys are
sorted, so emitted documents are stable and diffable.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import __version__
from .qmat import QMatrix, VerificationReport


class ParseError(ValueError):
    """Malformed matrix document."""


def _reject_constant(name):
    raise ParseError(f"non-finite value {name} in document")


def parse_document(text) -> dict:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed document: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("malformed document: top level must be an object")
    return doc


def parse_matrix(text) -> QMatrix:
    doc = parse_document(text)
    if "order" not in doc or "entries" not in doc:
        raise ParseError("malformed document: 'order' and 'entries' are required")
    n = doc["order"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"malformed document: order must be a positive integer, got {n!r}")
    rows = doc["entries"]
    if (
        not isinstance(rows, list)
        or len(rows) != n
        or any(not isinstance(r, list) or len(r) != n for r in rows)
    ):
        raise ParseError(f"dimension mismatch: entries must be an {n}x{n} array")
    data = np.empty((n, n, 4))
    for i, row in enumerate(rows):
        for j, e in enumerate(row):
            if not isinstance(e, list) or len(e) != 4:
                raise ParseError(f"dimension mismatch: entry ({i},{j}) must have 4 components")
            for k, v in enumerate(e):
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ParseError(f"malformed document: entry ({i},{j}) component {k} is not a number")
                if not math.isfinite(v):
                    raise ParseError(f"non-finite value in entry ({i},{j})")
                data[i, j, k] = v
    return QMatrix(data)


def _dumps(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, allow_nan=False) + "\n").encode("utf-8")


def matrix_to_dict(H: QMatrix, metadata: dict | None = None) -> dict:
    doc = {"order": H.order, "entries": [[[float(v) for v in e] for e in row] for row in H.data]}
    meta = {"generator_version": __version__}
    meta.update(metadata or {})
    doc["metadata"] = meta
    return doc


def emit_matrix(H: QMatrix, metadata: dict | None = None) -> bytes:
    return _dumps(matrix_to_dict(H, metadata))


def complex_to_matrix(M) -> QMatrix:
    return QMatrix.from_complex(M)


def real_to_matrix(M) -> QMatrix:
    return QMatrix.from_complex(np.asarray(M, dtype=float))


def report_to_dict(r: VerificationReport) -> dict:
    return {
        "entry_norm_dev": r.entry_norm_dev,
        "gram_row_dev": r.gram_row_dev,
        "gram_col_dev": r.gram_col_dev,
        "tolerance": r.tolerance,
        "pass": r.passed,
    }


def emit_report(r: VerificationReport) -> bytes:
    return _dumps(report_to_dict(r))


def emit(obj) -> bytes:
    return _dumps(obj)
