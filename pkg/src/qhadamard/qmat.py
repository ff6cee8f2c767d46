"""Quaternionic matrices: Hadamard verification, equivalence moves, circulant
cores and the complex/real adjoint constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quat import (
    DEFAULT_TOL,
    DomainError,
    Quaternion,
    qabs,
    qcommutator_norm,
    qconj,
    qmul,
)


class QMatrix:
    """Square matrix of quaternions, stored as a read-only (n, n, 4) array."""

    __slots__ = ("_data",)

    def __init__(self, data):
        data = np.array(data, dtype=float)
        if data.ndim != 3 or data.shape[0] != data.shape[1] or data.shape[2] != 4:
            raise ValueError(f"expected an (n, n, 4) array, got shape {data.shape}")
        if data.shape[0] < 1:
            raise ValueError("order must be at least 1")
        data.setflags(write=False)
        self._data = data

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence]) -> "QMatrix":
        def as4(v):
            if isinstance(v, Quaternion):
                return v.as_array()
            if isinstance(v, complex):
                return [v.real, v.imag, 0.0, 0.0]
            if np.isscalar(v):
                return [float(v), 0.0, 0.0, 0.0]
            return np.asarray(v, dtype=float)

        return cls([[as4(v) for v in row] for row in rows])

    @classmethod
    def from_complex(cls, m) -> "QMatrix":
        m = np.asarray(m, dtype=complex)
        zeros = np.zeros(m.shape)
        return cls(np.stack([m.real, m.imag, zeros, zeros], axis=-1))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        data = np.zeros((n, n, 4))
        data[np.arange(n), np.arange(n), 0] = 1.0
        return cls(data)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def order(self) -> int:
        return self._data.shape[0]

    def __getitem__(self, ij) -> Quaternion:
        i, j = ij
        return Quaternion.from_array(self._data[i, j])

    def entries(self) -> list[list[Quaternion]]:
        n = self.order
        return [[self[i, j] for j in range(n)] for i in range(n)]

    def core(self) -> "QMatrix":
        return QMatrix(self._data[1:, 1:])

    def conj_transpose(self) -> "QMatrix":
        return QMatrix(np.swapaxes(qconj(self._data), 0, 1))

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        # (AB)_ik = sum_j A_ij B_jk, keeping the factor order
        prod = qmul(self._data[:, :, None, :], other._data[None, :, :, :])
        return QMatrix(prod.sum(axis=1))

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self._data + other._data)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self._data - other._data)

    def scale(self, s: float) -> "QMatrix":
        return QMatrix(self._data * s)

    def max_abs_diff(self, other: "QMatrix") -> float:
        return float(np.max(qabs(self._data - other._data)))

    def allclose(self, other: "QMatrix", tol: float = DEFAULT_TOL) -> bool:
        return self.order == other.order and self.max_abs_diff(other) <= tol

    def is_complex(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.all(np.abs(self._data[..., 2:]) <= tol))

    def to_complex(self) -> np.ndarray:
        return self._data[..., 0] + 1j * self._data[..., 1]

    def __eq__(self, other) -> bool:
        return isinstance(other, QMatrix) and np.array_equal(self._data, other._data)

    def __repr__(self) -> str:
        return f"QMatrix(order={self.order})"


def entrywise_conj(u: Quaternion, H: QMatrix) -> QMatrix:
    """Apply q -> u q u^-1 to every entry."""
    u = u / abs(u)
    ua = np.broadcast_to(u.as_array(), H.data.shape)
    return QMatrix(qmul(qmul(ua, H.data), qconj(ua)))


# --- verification --------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    entry_norm_dev: float
    gram_row_dev: float
    gram_col_dev: float
    tolerance: float
    passed: bool

    @property
    def max_dev(self) -> float:
        return max(self.entry_norm_dev, self.gram_row_dev, self.gram_col_dev)


def _offdiag_max(G: np.ndarray) -> float:
    n = G.shape[0]
    if n == 1:
        return 0.0
    mags = qabs(G)
    mags[np.arange(n), np.arange(n)] = 0.0
    return float(mags.max())


def hadamard_check(H: QMatrix, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check unit entries and pairwise orthogonal rows and columns.

    Rows i, k are compared through sum_j h_ij conj(h_kj); columns j, l
    through sum_i conj(h_ij) h_il.
    """
    d = H.data
    entry_dev = float(np.max(np.abs(qabs(d) - 1.0)))
    rows = qmul(d[:, None, :, :], qconj(d)[None, :, :, :]).sum(axis=2)
    cols = qmul(qconj(d)[:, :, None, :], d[:, None, :, :]).sum(axis=0)
    row_dev = _offdiag_max(rows)
    col_dev = _offdiag_max(cols)
    ok = entry_dev <= tol and row_dev <= tol and col_dev <= tol
    return VerificationReport(entry_dev, row_dev, col_dev, tol, ok)


# --- equivalence moves ---------------------------------------------------

MOVE_KINDS = ("row_perm", "col_perm", "left_diag", "right_diag", "conjugate")


@dataclass(frozen=True)
class EquivalenceMove:
    """One dephasing / permutation / group-conjugation step.

    ``perm`` (0-based) for permutations: new row i is old row perm[i]
    (likewise for columns).  ``diag`` holds unit quaternions for the
    diagonal moves, ``u`` the unit conjugator.
    """

    kind: str
    perm: tuple[int, ...] | None = None
    diag: tuple[Quaternion, ...] | None = None
    u: Quaternion | None = None

    def __post_init__(self):
        if self.kind not in MOVE_KINDS:
            raise ValueError(f"unknown move kind {self.kind!r}")

    @classmethod
    def row_permutation(cls, perm) -> "EquivalenceMove":
        return cls("row_perm", perm=tuple(int(p) for p in perm))

    @classmethod
    def col_permutation(cls, perm) -> "EquivalenceMove":
        return cls("col_perm", perm=tuple(int(p) for p in perm))

    @classmethod
    def left_diagonal(cls, diag) -> "EquivalenceMove":
        return cls("left_diag", diag=tuple(diag))

    @classmethod
    def right_diagonal(cls, diag) -> "EquivalenceMove":
        return cls("right_diag", diag=tuple(diag))

    @classmethod
    def conjugation(cls, u: Quaternion) -> "EquivalenceMove":
        return cls("conjugate", u=u)

    def inverse(self) -> "EquivalenceMove":
        if self.perm is not None:
            return EquivalenceMove(self.kind, perm=tuple(int(i) for i in np.argsort(self.perm)))
        if self.diag is not None:
            return EquivalenceMove(self.kind, diag=tuple(d.conj() for d in self.diag))
        return EquivalenceMove(self.kind, u=self.u.conj())


def _check_unit(qs, what: str) -> None:
    for q in qs:
        if abs(abs(q) - 1.0) > 1e-9:
            raise DomainError(f"{what} entries must be unit quaternions, got {q!r}")


def apply_move(H: QMatrix, m: EquivalenceMove) -> QMatrix:
    n = H.order
    d = H.data
    if m.perm is not None:
        if len(m.perm) != n or sorted(m.perm) != list(range(n)):
            raise DomainError(f"permutation {m.perm} is not a bijection on {n} indices")
        idx = list(m.perm)
        return QMatrix(d[idx, :] if m.kind == "row_perm" else d[:, idx])
    if m.diag is not None:
        if len(m.diag) != n:
            raise DomainError(f"diagonal of length {len(m.diag)} for order {n}")
        _check_unit(m.diag, "diagonal")
        dg = np.array([q.as_array() for q in m.diag])
        if m.kind == "left_diag":
            return QMatrix(qmul(dg[:, None, :], d))
        return QMatrix(qmul(d, dg[None, :, :]))
    _check_unit([m.u], "conjugator")
    return entrywise_conj(m.u, H)


def apply_moves(H: QMatrix, moves) -> QMatrix:
    for m in moves:
        H = apply_move(H, m)
    return H


def dephase(H: QMatrix) -> tuple[QMatrix, EquivalenceMove, EquivalenceMove]:
    """Bring H to dephased form D1 H D2.

    Rows are multiplied on the left by inv(h_i1) first, then columns on
    the right by the inverse of the updated first-row entry.  The moves
    are returned so that the original can be recovered.
    """
    first_col = [H[i, 0] for i in range(H.order)]
    if any(q.norm2() == 0.0 for q in first_col):
        raise DomainError("first column has a zero entry")
    lefts = [q.inv() for q in first_col]
    rows_done = QMatrix(qmul(np.array([q.as_array() for q in lefts])[:, None, :], H.data))
    first_row = [rows_done[0, j] for j in range(H.order)]
    if any(q.norm2() == 0.0 for q in first_row):
        raise DomainError("first row has a zero entry")
    rights = [q.inv() for q in first_row]
    out = QMatrix(qmul(rows_done.data, np.array([q.as_array() for q in rights])[None, :, :]))
    # the factors are unit whenever the border of H is
    return out, EquivalenceMove.left_diagonal(lefts), EquivalenceMove.right_diagonal(rights)


# --- circulant cores -----------------------------------------------------


def circulant_from_row(core_row) -> QMatrix:
    """Bordered matrix whose core rows are successive right shifts of core_row."""
    row = [q if isinstance(q, Quaternion) else Quaternion(float(q)) for q in core_row]
    m = len(row)
    if m < 1:
        raise ValueError("core row must be nonempty")
    n = m + 1
    data = np.zeros((n, n, 4))
    data[0, :, 0] = 1.0
    data[:, 0, 0] = 1.0
    arr = np.array([q.as_array() for q in row])
    for i in range(m):
        for j in range(m):
            data[i + 1, j + 1] = arr[(j - i) % m]
    return QMatrix(data)


def core_row(H: QMatrix) -> tuple[Quaternion, ...]:
    return tuple(H[1, j] for j in range(1, H.order))


def is_circulant_core(H: QMatrix, tol: float = DEFAULT_TOL) -> bool:
    c = H.data[1:, 1:]
    shifted = np.roll(np.roll(c, 1, axis=0), 1, axis=1)
    return bool(np.all(qabs(c - shifted) <= tol))


def is_dephased(H: QMatrix, tol: float = DEFAULT_TOL) -> bool:
    d = H.data
    one = np.array([1.0, 0.0, 0.0, 0.0])
    return bool(np.all(qabs(d[0] - one) <= tol) and np.all(qabs(d[:, 0] - one) <= tol))


def commuting_core_test(H: QMatrix, tol: float = DEFAULT_TOL) -> bool:
    """True iff all entries commute pairwise, i.e. one conjugation makes H complex."""
    flat = H.data.reshape(-1, 4)
    comm = qcommutator_norm(flat[:, None, :], flat[None, :, :])
    return bool(np.all(comm <= tol))


# --- adjoints ------------------------------------------------------------


def complex_adjoint(A: QMatrix) -> np.ndarray:
    """chi_A = [[A0, A1], [-conj(A1), conj(A0)]] where A = A0 + A1 j."""
    d = A.data
    a0 = d[..., 0] + 1j * d[..., 1]
    a1 = d[..., 2] + 1j * d[..., 3]
    return np.block([[a0, a1], [-a1.conj(), a0.conj()]])


def real_adjoint(A: QMatrix) -> np.ndarray:
    d = A.data
    a0, a1, a2, a3 = d[..., 0], d[..., 1], d[..., 2], d[..., 3]
    return np.block(
        [
            [a0, a1, -a2, a3],
            [a1, -a0, -a3, -a2],
            [a2, -a3, a0, a1],
            [a3, a2, a1, -a0],
        ]
    )


def _split(M: np.ndarray, parts: int, what: str) -> int:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"{what} matrix must be square")
    if M.shape[0] == 0 or M.shape[0] % parts:
        raise DomainError(f"{what} matrix order {M.shape[0]} is not a positive multiple of {parts}")
    return M.shape[0] // parts


def compliance_check_complex(M, tol: float = DEFAULT_TOL) -> bool:
    M = np.asarray(M, dtype=complex)
    n = _split(M, 2, "complex")
    a0, a1 = M[:n, :n], M[:n, n:]
    return bool(np.max(np.abs(M[n:, :n] + a1.conj())) <= tol and np.max(np.abs(M[n:, n:] - a0.conj())) <= tol)


def compliance_check_real(M, tol: float = DEFAULT_TOL) -> bool:
    M = np.asarray(M)
    if np.iscomplexobj(M):
        if np.max(np.abs(M.imag)) > tol:
            return False
        M = M.real
    n = _split(M, 4, "real")
    a0, a1, a2, a3 = (M[:n, k * n : (k + 1) * n] for k in range(4))
    a2 = -a2
    expected = real_adjoint(QMatrix(np.stack([a0, a1, a2, a3], axis=-1)))
    return bool(np.max(np.abs(M - expected)) <= tol)


def _complex_hadamard_dev(M: np.ndarray) -> float:
    m = M.shape[0]
    return max(
        float(np.max(np.abs(np.abs(M) - 1.0))),
        float(np.max(np.abs(M @ M.conj().T - m * np.eye(m)))),
    )


def lift_from_complex(M, tol: float = DEFAULT_TOL) -> QMatrix:
    """Quaternionic Hadamard (1/sqrt 2) A from a compliant complex Hadamard chi_A."""
    M = np.asarray(M, dtype=complex)
    n = _split(M, 2, "complex")
    dev = _complex_hadamard_dev(M)
    if dev > tol:
        raise DomainError(f"input is not a complex Hadamard matrix (deviation {dev:.3g})")
    if not compliance_check_complex(M, tol):
        raise DomainError("complex Hadamard matrix is not quaternionically compliant")
    a0, a1 = M[:n, :n], M[:n, n:]
    A = QMatrix(np.stack([a0.real, a0.imag, a1.real, a1.imag], axis=-1))
    return A.scale(1.0 / math.sqrt(2.0))


def lift_from_real(M, tol: float = DEFAULT_TOL) -> QMatrix:
    """Quaternionic Hadamard (1/2) A from a compliant real Hadamard psi_A."""
    M = np.asarray(M, dtype=float)
    n = _split(M, 4, "real")
    m = M.shape[0]
    dev = max(
        float(np.max(np.abs(np.abs(M) - 1.0))),
        float(np.max(np.abs(M @ M.T - m * np.eye(m)))),
    )
    if dev > tol:
        raise DomainError(f"input is not a real Hadamard matrix (deviation {dev:.3g})")
    if not compliance_check_real(M, tol):
        raise DomainError("real Hadamard matrix is not quaternionically compliant")
    a0, a1, a2, a3 = (M[:n, k * n : (k + 1) * n] for k in range(4))
    return QMatrix(np.stack([a0, a1, -a2, a3], axis=-1)).scale(0.5)
