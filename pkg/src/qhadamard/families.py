"""Closed-form parametric families of quaternionic Hadamard matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qmat import QMatrix, circulant_from_row
from .quat import I, ONE, DomainError, Quaternion, exp_axis, mul, sphere_axis

SQRT5 = math.sqrt(5.0)
A0_MIN = (-1.0 - SQRT5) / 4.0
A0_MAX = (-1.0 + SQRT5) / 4.0

FAMILIES = (
    "fourier",
    "order3",
    "order4generic",
    "order5sphere",
    "order5oneparam",
    "order5noncirc",
)


def _sign(s) -> int:
    if s in (1, "+", "+1"):
        return 1
    if s in (-1, "-", "-1"):
        return -1
    raise ValueError(f"sign must be + or -, got {s!r}")


def fourier_quat(n: int, theta: float = 0.0, phi: float = math.pi / 2) -> QMatrix:
    """Fourier matrix with the complex unit replaced by the axis q(theta, phi)."""
    if n < 1:
        raise DomainError("order must be positive")
    q = sphere_axis(theta, phi)
    rows = [[exp_axis(q, 2 * math.pi * ((j * k) % n) / n) for k in range(n)] for j in range(n)]
    return QMatrix.from_entries(rows)


def order3_entry(theta: float, phi: float) -> Quaternion:
    r = math.sqrt(3.0) / 2.0
    return Quaternion(-0.5, 0.0, 0.0, 0.0) + r * sphere_axis(theta, phi)


def order3(theta: float, phi: float) -> QMatrix:
    a = order3_entry(theta, phi)
    return circulant_from_row([a, a.conj()])


def order4_generic_entries(theta: float, phi: float, gamma: float) -> dict[str, Quaternion]:
    a = Quaternion(
        math.cos(theta) * math.sin(phi),
        math.sin(theta) * math.sin(phi),
        math.cos(phi),
        0.0,
    )
    x = Quaternion(0.0, math.cos(gamma), math.sin(gamma), 0.0)
    a_hat = Quaternion(a.w, a.x, 0.0, 0.0)
    one_a = ONE + a
    one_ah = ONE + a_hat
    if abs(one_a) < 1e-12 or abs(one_ah) < 1e-12:
        raise DomainError("parameters give a = -1")
    u_a = one_a / abs(one_a)
    u_ah = one_ah / abs(one_ah)
    bb = mul(u_ah, I)
    cc = mul(x, u_a)
    dd = mul(mul(x, u_ah), I)
    return {"a": a, "x": x, "b": mul(bb, bb), "c": mul(cc, cc), "d": mul(dd, dd)}


def order4_generic(theta: float, phi: float, gamma: float) -> QMatrix:
    e = order4_generic_entries(theta, phi, gamma)
    a, b, c, d = e["a"], e["b"], e["c"], e["d"]
    rows = [
        [ONE, ONE, ONE, ONE],
        [ONE, a, b, -1 - a - b],
        [ONE, c, d, -1 - c - d],
        [ONE, -1 - a - c, -1 - b - d, 1 + a + b + c + d],
    ]
    return QMatrix.from_entries(rows)


def order5_sphere_core(t: float, s_a=1) -> tuple[Quaternion, ...]:
    s = _sign(s_a)
    a = Quaternion(-0.25, s * math.sqrt(15.0 / 16.0), 0.0, 0.0)
    r = math.sqrt(5.0 / 6.0)
    c = Quaternion(-0.25, -s * math.sqrt(5.0 / 48.0), r * math.cos(t), r * math.sin(t))
    return (a, a.conj(), c, c.conj())


def order5_sphere(t: float, s_a=1) -> QMatrix:
    return circulant_from_row(order5_sphere_core(t, s_a))


ROOT_CHOICES = ("principal", "degenerate")


def oneparam_components(a0: float, s_d=1, root: str = "principal") -> dict[str, float]:
    """Real components of the one-complex-entry order-5 family.

    In this frame b is complex, d has no k part and a, c live in the
    1, i, j span.  ``principal`` takes the larger root of the quadratic
    for a1; the other root is the same family seen at -1/2 - a0 after a
    cyclic shift of the core.
    """
    if root not in ROOT_CHOICES:
        raise ValueError(f"root must be one of {ROOT_CHOICES}")
    if not (A0_MIN - 1e-12 <= a0 <= A0_MAX + 1e-12):
        raise DomainError(f"a0={a0} outside [{A0_MIN}, {A0_MAX}]")
    a0 = min(max(a0, A0_MIN), A0_MAX)
    sd = _sign(s_d)
    rad_b = (1 - 2 * a0) * (3 + 2 * a0)
    assert rad_b > 0
    b0 = -0.5 - a0
    b1 = math.sqrt(rad_b) / 2
    d1 = -(1 + 4 * a0 * a0) / (2 * math.sqrt(rad_b))
    rad_d = 2 * (1 - a0) * (-1 + 2 * a0 + 4 * a0 * a0) / (-3 + 4 * a0 + 4 * a0 * a0)
    assert rad_d > -1e-12
    d2 = sd * math.sqrt(max(rad_d, 0.0))
    if abs(d1 - b1) < 1e-14:
        raise DomainError("b1 = d1")
    k = d2 / (d1 - b1)
    # a0^2 + a1^2 + (k (a1 + b1))^2 = 1
    qa = 1 + k * k
    qb = 2 * k * k * b1
    qc = k * k * b1 * b1 - (1 - a0 * a0)
    disc = qb * qb - 4 * qa * qc
    assert disc > -1e-12
    sq = math.sqrt(max(disc, 0.0))
    a1 = (-qb + sq) / (2 * qa) if root == "principal" else (-qb - sq) / (2 * qa)
    a2 = k * (a1 + b1)
    return {"a0": a0, "a1": a1, "a2": a2, "b0": b0, "b1": b1, "d1": d1, "d2": d2}


def order5_oneparam_core(a0: float, s_d=1, root: str = "principal") -> tuple[Quaternion, ...]:
    p = oneparam_components(a0, s_d, root)
    a = Quaternion(p["a0"], p["a1"], p["a2"], 0.0)
    b = Quaternion(p["b0"], p["b1"], 0.0, 0.0)
    d = Quaternion(p["b0"], p["d1"], p["d2"], 0.0)
    c = -1 - a - b - d
    return (a, b, c, d)


def order5_oneparam(a0: float, s_d=1, root: str = "principal") -> QMatrix:
    return circulant_from_row(order5_oneparam_core(a0, s_d, root))


def printed_a1_a2(a0: float, sign=1) -> tuple[float, float]:
    """The two closed-form lines for a1, a2 as they appear in the source,
    with matched signs.  Kept only for :func:`closed_form_discrepancy`."""
    s = _sign(sign)
    num1 = math.sqrt(1 - 2 * a0) * (-1 + 2 * a0 + 4 * a0 * a0) + s * math.sqrt(
        2 * (3 + 2 * a0) * (1 - 3 * a0 + 2 * a0 * a0)
    )
    a1 = num1 / (2 * (a0 - 1) * math.sqrt(3 + 2 * a0))
    num2 = math.sqrt(2 - 4 * a0) * (-s + s * a0) + math.sqrt((3 + 2 * a0) * (1 - 3 * a0 + 2 * a0 * a0))
    a2 = num2 / (2 * (1 - a0) * math.sqrt(1 - 2 * a0))
    return a1, a2


def closed_form_discrepancy(a0: float) -> dict:
    """Compare the printed a1/a2 closed forms with the quadratic solution.

    Reports, per sign, how far (a0, a1, a2) is from unit length and the
    distance to the nearest quadratic root.
    """
    roots = [oneparam_components(a0, 1, r) for r in ROOT_CHOICES]
    out = {}
    for s, label in ((1, "+"), (-1, "-")):
        a1, a2 = printed_a1_a2(a0, s)
        unit_dev = abs(math.sqrt(a0 * a0 + a1 * a1 + a2 * a2) - 1.0)
        root_dev = min(abs(a1 - r["a1"]) for r in roots)
        out[label] = {"a1": a1, "a2": a2, "unit_norm_dev": unit_dev, "a1_vs_quadratic": root_dev}
    return out


def order5_noncirculant_entries(t: float) -> tuple[Quaternion, ...]:
    h = math.sqrt(3.0) / 2.0
    a = I
    b = Quaternion(0.0, -0.5, h * math.cos(t), h * math.sin(t))
    c = Quaternion(-1.0)
    d = Quaternion(0.0, -0.5, -h * math.cos(t), -h * math.sin(t))
    return (a, b, c, d)


def order5_noncirculant(t: float) -> QMatrix:
    a, b, c, d = order5_noncirculant_entries(t)
    rows = [
        [ONE] * 5,
        [ONE, a, b, c, d],
        [ONE, b, a, d, c],
        [ONE, c, d, a, b],
        [ONE, d, c, b, a],
    ]
    return QMatrix.from_entries(rows)


def f2_tensor_f2() -> QMatrix:
    f2 = np.array([[1.0, 1.0], [1.0, -1.0]])
    return QMatrix.from_complex(np.kron(f2, f2))


@dataclass(frozen=True)
class FamilyPoint:
    family: str
    params: dict = field(default_factory=dict)
    branches: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")


def generate(point: FamilyPoint) -> QMatrix:
    p, br = point.params, point.branches
    f = point.family
    if f == "fourier":
        return fourier_quat(int(p["n"]), p.get("theta", 0.0), p.get("phi", math.pi / 2))
    if f == "order3":
        return order3(p["theta"], p["phi"])
    if f == "order4generic":
        return order4_generic(p["theta"], p["phi"], p["gamma"])
    if f == "order5sphere":
        return order5_sphere(p["t"], br.get("s_a", 1))
    if f == "order5oneparam":
        return order5_oneparam(p["a0"], br.get("s_d", 1), br.get("root_choice", "principal"))
    return order5_noncirculant(p["t"])
