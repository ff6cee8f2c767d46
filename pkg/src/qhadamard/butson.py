"""Root-of-unity structure of quaternionic Hadamard matrices."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .qmat import QMatrix
from .quat import (
    DEFAULT_TOL,
    I,
    ONE,
    Quaternion,
    conjugal,
    exp_axis,
    mul,
    normalize_to_complex,
    qabs,
    qmul,
)

R_MAX = 24
AXIS_ANGLE_TOL = 1e-6


def is_root_of_unity(q: Quaternion, r: int, tol: float = DEFAULT_TOL) -> bool:
    if r < 1:
        raise ValueError("r must be at least 1")
    p = ONE
    for _ in range(r):
        p = mul(p, q)
    return abs(p - ONE) <= tol


def is_root_of_unity_conjugal(q: Quaternion, r: int, tol: float = DEFAULT_TOL) -> bool:
    """Independent route: q is an rth root iff it is conjugal to exp(2 pi i s / r)."""
    if r < 1:
        raise ValueError("r must be at least 1")
    if abs(abs(q) - 1.0) > tol:
        return False
    return any(conjugal(q, exp_axis(I, 2 * math.pi * s / r), tol) for s in range(r))


@dataclass
class ButsonProfile:
    minimal_r: int | None
    q_axis: Quaternion | None
    per_entry_order: list[list[int | None]]
    diagnostics: list[str] = field(default_factory=list)


def _power_devs(H: QMatrix, r_max: int) -> np.ndarray:
    """devs[r-1, i, j] = |h_ij^r - 1| for r = 1..r_max."""
    d = H.data
    one = np.array([1.0, 0.0, 0.0, 0.0])
    p = d.copy()
    out = np.empty((r_max,) + d.shape[:2])
    for r in range(r_max):
        out[r] = qabs(p - one)
        p = qmul(p, d)
    return out


def shared_axis(H: QMatrix, tol: float = DEFAULT_TOL) -> Quaternion | None:
    """Common unit axis q with every entry in span{1, q}, if there is one.

    Imaginary parts are sign-aligned to the first non-real entry and
    averaged; any entry off that line by more than AXIS_ANGLE_TOL radians
    rejects.  Real matrices have no distinguished axis and give None.
    """
    vecs = H.data.reshape(-1, 4)[:, 1:]
    norms = np.linalg.norm(vecs, axis=1)
    live = norms > tol
    if not np.any(live):
        return None
    units = vecs[live] / norms[live, None]
    ref = units[0]
    units = units * np.where(units @ ref < 0, -1.0, 1.0)[:, None]
    axis = units.mean(axis=0)
    axis /= np.linalg.norm(axis)
    cosines = np.clip(units @ axis, -1.0, 1.0)
    if np.max(np.arccos(cosines)) > AXIS_ANGLE_TOL:
        return None
    # canonical sign: first nonzero component positive
    for comp in axis:
        if abs(comp) > 1e-12:
            if comp < 0:
                axis = -axis
            break
    return Quaternion(0.0, *axis)


def butson_profile(H: QMatrix, r_max: int = R_MAX, tol: float = DEFAULT_TOL) -> ButsonProfile:
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    devs = _power_devs(H, r_max)
    n = H.order
    per_entry: list[list[int | None]] = [[None] * n for _ in range(n)]
    diagnostics = []
    for i in range(n):
        for j in range(n):
            hits = np.nonzero(devs[:, i, j] <= tol)[0]
            if hits.size:
                per_entry[i][j] = int(hits[0]) + 1
            near = np.nonzero((devs[:, i, j] > tol) & (devs[:, i, j] <= 100 * tol))[0]
            if near.size:
                cands = sorted({int(r) + 1 for r in near} | ({per_entry[i][j]} if per_entry[i][j] else set()))
                diagnostics.append(f"entry ({i},{j}) near orders {cands}")
    all_ok = np.all(devs <= tol, axis=(1, 2))
    minimal_r = int(np.argmax(all_ok)) + 1 if np.any(all_ok) else None
    return ButsonProfile(minimal_r, shared_axis(H, tol), per_entry, diagnostics)


def q_type_conjugate_to_complex(H: QMatrix, tol: float = DEFAULT_TOL) -> Quaternion | None:
    """Unit u making every entry of u H u^-1 complex, or None if impossible."""
    if H.is_complex(tol):
        return ONE
    axis = shared_axis(H, tol)
    if axis is None:
        return None
    return normalize_to_complex(axis)


@dataclass
class BH45Report:
    candidates: int
    valid_rows: list
    explanation: str
    fifth_root_valid_rows: int
    noncirculant_rows_valid: bool

    @property
    def empty(self) -> bool:
        return not self.valid_rows


def dephased_row_candidates(r: int, length: int) -> list[tuple[int, ...]]:
    """Exponent tuples s with 1 + sum exp(2 pi i s_k / r) = 0."""
    roots = np.exp(2j * np.pi * np.arange(r) / r)
    out = []
    for combo in itertools.product(range(r), repeat=length):
        if abs(1 + roots[list(combo)].sum()) <= 1e-9:
            out.append(combo)
    return out


PARITY_TEXT = (
    "Write a dephased row as 1 + a + b + c + d with a, b, c, d in {1, i, -1, -i}. "
    "Let m be how many of a, b, c, d are real. The real parts give 1 plus m terms "
    "of +-1, which vanishes only when m is odd. The i parts are 4 - m terms of +-1, "
    "which vanish only when 4 - m is even, so m is even. Both cannot hold, so no "
    "row of a complex order-5 Hadamard matrix over fourth roots of unity exists "
    "and BH(4,5) is empty."
)


def bh45_emptiness() -> BH45Report:
    from .families import order5_noncirculant

    candidates = 4**4
    valid = dephased_row_candidates(4, 4)
    fifth = dephased_row_candidates(5, 4)
    H = order5_noncirculant(0.3)
    # each non-border row, leading 1 included, must sum to zero
    row_sums = H.data[1:].sum(axis=1)
    nonc_ok = bool(np.all(qabs(row_sums) <= 1e-12))
    return BH45Report(candidates, valid, PARITY_TEXT, len(fifth), nonc_ok)
