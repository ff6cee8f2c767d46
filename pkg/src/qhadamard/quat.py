"""Scalar quaternion arithmetic.

Components are ordered (w, x, y, z) for w + x*i + y*j + z*k, with the
Hamilton rule i*j = k (so i*j*k = -1).

Besides the :class:`Quaternion` value type, this module carries a few
vectorised kernels (``qmul``, ``qconj``, ...) that work on float or complex
arrays whose last axis has length 4; the matrix and solver code is built
on those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


class DomainError(ValueError):
    """Raised when an operation is applied outside its domain."""


# --- array kernels -------------------------------------------------------


def qmul(p, q):
    """Hamilton product of quaternion arrays (broadcast over leading axes)."""
    p = np.asarray(p)
    q = np.asarray(q)
    pw, px, py, pz = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    qw, qx, qy, qz = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


_CONJ_SIGNS = np.array([1.0, -1.0, -1.0, -1.0])


def qconj(q):
    return np.asarray(q) * _CONJ_SIGNS


def qnorm2(q):
    q = np.asarray(q)
    return np.sum(q * q, axis=-1)


def qabs(q):
    return np.sqrt(qnorm2(q))


def qcommutator_norm(p, q):
    """|pq - qp| = 2 |Im p x Im q|, computed without forming the products."""
    cross = np.cross(np.asarray(p)[..., 1:], np.asarray(q)[..., 1:])
    return 2.0 * np.sqrt(np.sum(cross * cross, axis=-1))


# --- value type ----------------------------------------------------------


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        w, x, y, z = (float(v) for v in a)
        return cls(w, x, y, z)

    @classmethod
    def from_complex(cls, c: complex) -> "Quaternion":
        return cls(c.real, c.imag, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    def __iter__(self):
        return iter((self.w, self.x, self.y, self.z))

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def __abs__(self) -> float:
        return math.sqrt(self.norm2())

    def imag_norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inv(self) -> "Quaternion":
        return inv(self)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return mul(self, other)

    def __rmul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return mul(other, self)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w / other, self.x / other, self.y / other, self.z / other)
        return NotImplemented

    def __pow__(self, n: int) -> "Quaternion":
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else inv(self)
        out = ONE
        for _ in range(abs(n)):
            out = mul(out, base)
        return out

    def isclose(self, other, tol: float = DEFAULT_TOL) -> bool:
        return abs(self - _coerce(other)) <= tol

    def is_complex(self, tol: float = DEFAULT_TOL) -> bool:
        return math.hypot(self.y, self.z) <= tol

    def is_real(self, tol: float = DEFAULT_TOL) -> bool:
        return self.imag_norm() <= tol

    def __repr__(self) -> str:
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


def _coerce(v):
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, (int, float, np.floating, np.integer)):
        return Quaternion(float(v))
    if isinstance(v, complex):
        return Quaternion.from_complex(v)
    return NotImplemented


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)  # noqa: E741
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


# --- operations ----------------------------------------------------------


def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    return Quaternion(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )


def inv(q: Quaternion) -> Quaternion:
    n2 = q.norm2()
    if n2 == 0.0:
        raise DomainError("zero quaternion has no inverse")
    return q.conj() / n2


def _unit(u: Quaternion) -> Quaternion:
    n = abs(u)
    if n == 0.0:
        raise DomainError("conjugator must be nonzero")
    return u / n


def group_conj(u: Quaternion, q: Quaternion) -> Quaternion:
    """Return u q u^-1.  ``u`` is normalised first, so any nonzero u works."""
    u = _unit(u)
    return mul(mul(u, q), u.conj())


def conjugal(q: Quaternion, r: Quaternion, tol: float = DEFAULT_TOL) -> bool:
    """Brenner's test: same real part and same imaginary-part length."""
    return abs(q.w - r.w) <= tol and abs(q.imag_norm() - r.imag_norm()) <= tol


def _rotor(src: np.ndarray, dst: np.ndarray) -> Quaternion:
    """Unit u with u*src*u^-1 = dst for unit 3-vectors src, dst.

    The rotation axis is src x dst.  Near-antiparallel pairs first take a
    half turn about an axis perpendicular to src (j when src is -i).
    """
    dot = float(np.dot(src, dst))
    cross = np.cross(src, dst)
    if dot < 0 and np.linalg.norm(cross) < 1e-6:
        axis = np.cross(src, [0.0, 0.0, 1.0])
        if np.linalg.norm(axis) < 0.5:
            axis = np.cross(src, [1.0, 0.0, 0.0])
        half = Quaternion(0.0, *(axis / np.linalg.norm(axis)))
        turned = mul(mul(half, Quaternion(0.0, *src)), half.conj()).imag
        return mul(_rotor(turned, dst), half)
    u = np.concatenate([[1.0 + dot], cross])
    return Quaternion.from_array(u / np.linalg.norm(u))


def normalize_to_complex(q: Quaternion) -> Quaternion:
    """Unit u taking q to Re(q) + |Im(q)| i under group conjugation."""
    n = q.imag_norm()
    if n == 0.0:
        return ONE
    return _rotor(q.imag / n, np.array([1.0, 0.0, 0.0]))


def normalize_pair(q: Quaternion, r: Quaternion, tol: float = 1e-12) -> Quaternion:
    """Unit u making u q u^-1 complex (nonnegative i part) and u r u^-1 free of k.

    Two rotations: the first turns the plane spanned by Im(q), Im(r) onto
    the i-j plane, the second spins about k to bring Im(q) onto +i.
    """
    vq, vr = q.imag, r.imag
    nq, nr = np.linalg.norm(vq), np.linalg.norm(vr)
    if nq <= tol and nr <= tol:
        return ONE
    if nq <= tol:
        return normalize_to_complex(r)
    normal = np.cross(vq, vr)
    # relative test: sine of the angle between the two imaginary parts
    if np.linalg.norm(normal) <= tol * nq * nr:
        return normalize_to_complex(q)
    normal = normal / np.linalg.norm(normal)
    target = np.array([0.0, 0.0, 1.0 if normal[2] >= 0 else -1.0])
    u1 = _rotor(normal, target)
    q1 = group_conj(u1, q)
    angle = -math.atan2(q1.y, q1.x)
    u2 = Quaternion(math.cos(angle / 2), 0.0, 0.0, math.sin(angle / 2))
    return mul(u2, u1)


def _check_unit_pure(q: Quaternion, tol: float = 1e-12) -> None:
    if abs(q.w) > tol or abs(abs(q) - 1.0) > tol:
        raise DomainError(f"axis must be a unit pure quaternion, got {q!r}")


def exp_axis(q: Quaternion, theta: float) -> Quaternion:
    """cos(theta) + q sin(theta) for a square root q of -1."""
    _check_unit_pure(q)
    s = math.sin(theta)
    return Quaternion(math.cos(theta), q.x * s, q.y * s, q.z * s)


def sphere_axis(theta: float, phi: float) -> Quaternion:
    return Quaternion(
        0.0,
        math.cos(theta) * math.sin(phi),
        math.sin(theta) * math.sin(phi),
        math.cos(phi),
    )
