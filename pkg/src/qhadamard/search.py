"""Least-squares search for circulant-core Hadamard matrices of orders 3-5
and classification of what it finds."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .families import A0_MAX, A0_MIN, order3_entry, order5_oneparam_core, order5_sphere_core
from .quat import (
    ONE,
    DomainError,
    Quaternion,
    group_conj,
    normalize_pair,
    normalize_to_complex,
    qcommutator_norm,
    qconj,
    qmul,
)

ORDERS = (3, 4, 5)
CONVERGENCE_TOL = 1e-8
# keep iterating past convergence: at singular roots the entry error is
# only about sqrt(residual)
POLISH_TOL = 1e-15
CLASSIFY_TOL = 1e-6
MAX_ITER = 500

LABELS = ("fourier", "sphere_family", "one_param", "order3_family", "f2_tensor_f2", "unclassified")


def _core_len(order: int) -> int:
    if order not in ORDERS:
        raise DomainError(f"order must be one of {ORDERS}, got {order}")
    return order - 1


def _as_array(core) -> np.ndarray:
    return np.array([q.as_array() if isinstance(q, Quaternion) else q for q in core], dtype=float)


# --- residual --------------------------------------------------------------


def residual_vector(order: int, x):
    """Residual for flattened cores ``x`` of shape (..., 4 * (order - 1)).

    Layout: unit-norm defects, the row-sum defect 1 + sum(core), then for
    each cyclic shift s = 1 .. (order - 1) // 2 the inner product of the
    first core row with its s-fold right shift, bordered by the leading 1.
    Works on complex input too (used for complex-step derivatives).
    """
    m = _core_len(order)
    x = np.asarray(x)
    c = x.reshape(x.shape[:-1] + (m, 4))
    one = np.zeros(4)
    one[0] = 1.0
    parts = [np.sum(c * c, axis=-1) - 1.0, one + c.sum(axis=-2)]
    for s in range(1, m // 2 + 1):
        shifted = np.roll(c, s, axis=-2)
        parts.append(one + qmul(c, qconj(shifted)).sum(axis=-2))
    return np.concatenate(parts, axis=-1)


def circulant_residual(order: int, core) -> np.ndarray:
    arr = _as_array(core)
    if arr.shape != (_core_len(order), 4):
        raise DomainError(f"order {order} needs {order - 1} core entries, got {len(arr)}")
    return residual_vector(order, arr.ravel())


def residual_norm(order: int, core) -> float:
    return float(np.linalg.norm(circulant_residual(order, core)))


def jacobian(order: int, x, step: float = 1e-30) -> np.ndarray:
    """Complex-step Jacobian: exact to rounding for these polynomial residuals."""
    x = np.asarray(x, dtype=float)
    probes = x[None, :] + 1j * step * np.eye(x.size)
    return (residual_vector(order, probes).imag / step).T


def jacobian_central(order: int, x, step: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    e = step * np.eye(x.size)
    return ((residual_vector(order, x + e) - residual_vector(order, x - e)) / (2 * step)).T


# --- solver ----------------------------------------------------------------


@dataclass
class LMResult:
    x: np.ndarray
    residual: float
    iterations: int
    converged: bool


def levenberg_marquardt(
    order: int,
    x0,
    max_iter: int = MAX_ITER,
    tol: float = CONVERGENCE_TOL,
    polish_tol: float = POLISH_TOL,
) -> LMResult:
    """Damped Gauss-Newton with the damping x10 on rejection, /10 on acceptance.

    Iterates until the residual drops below ``polish_tol``, the damping
    blows up, or ``max_iter`` is reached; ``converged`` reports residual
    <= ``tol``.
    """
    x = np.asarray(x0, dtype=float).copy()
    r = residual_vector(order, x)
    cost = float(r @ r)
    lam = 1e-3
    eye = np.eye(x.size)
    it = 0
    while it < max_iter:
        it += 1
        if math.sqrt(cost) <= polish_tol:
            break
        J = jacobian(order, x)
        g = J.T @ r
        A = J.T @ J
        accepted = False
        while lam < 1e16:
            step = np.linalg.solve(A + lam * eye, -g)
            x_new = x + step
            r_new = residual_vector(order, x_new)
            c_new = float(r_new @ r_new)
            if c_new < cost:
                x, r, cost = x_new, r_new, c_new
                lam = max(lam / 10.0, 1e-15)
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            break
    res = math.sqrt(cost)
    return LMResult(x, res, it, res <= tol)


def restart_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for one restart; independent of scheduling."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def random_core(order: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal((_core_len(order), 4))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# --- classification ----------------------------------------------------------


@dataclass
class Classification:
    label: str
    params: dict = field(default_factory=dict)
    conjugator: Quaternion = ONE
    match_residual: float = float("nan")


def _rotate(core, k: int):
    return tuple(core[(j + k) % len(core)] for j in range(len(core)))


def _max_diff(xs, ys) -> float:
    return max(abs(x - y) for x, y in zip(xs, ys, strict=True))


def _all_commute(core, tol: float) -> bool:
    arr = _as_array(core)
    return bool(np.all(qcommutator_norm(arr[:, None, :], arr[None, :, :]) <= tol))


def _first_nonreal(core, tol: float) -> Quaternion | None:
    return next((q for q in core if q.imag_norm() > tol), None)


def classify_order3(core, tol: float = CLASSIFY_TOL) -> Classification:
    a, b = core
    if abs(a.w + 0.5) > tol or abs(b - a.conj()) > tol:
        return Classification("unclassified")
    v = a.imag / np.linalg.norm(a.imag)
    theta = math.atan2(v[1], v[0])
    phi = math.acos(max(-1.0, min(1.0, v[2])))
    gen = order3_entry(theta, phi)
    match = _max_diff((a, b), (gen, gen.conj()))
    if match > tol:
        return Classification("unclassified", match_residual=match)
    return Classification("order3_family", {"theta": theta, "phi": phi}, ONE, match)


def classify_order4(core, tol: float = CLASSIFY_TOL) -> Classification:
    # circulant-core solutions are real +-1 cores, i.e. dephased F2 x F2
    match = max(max(q.imag_norm(), abs(abs(q.w) - 1.0)) for q in core)
    if match > tol:
        return Classification("unclassified", match_residual=match)
    return Classification("f2_tensor_f2", {"core_signs": [int(round(q.w)) for q in core]}, ONE, match)


def _classify_fourier(core, tol: float) -> Classification | None:
    if not _all_commute(core, tol):
        return None
    ref = _first_nonreal(core, tol)
    u = ONE if ref is None else normalize_to_complex(ref)
    canon = [group_conj(u, q) for q in core]
    exps = []
    match = 0.0
    for q in canon:
        s = round(math.atan2(q.x, q.w) * 5 / (2 * math.pi)) % 5
        root = Quaternion(math.cos(2 * math.pi * s / 5), math.sin(2 * math.pi * s / 5))
        match = max(match, abs(q - root))
        exps.append(int(s))
    if match > tol:
        return Classification("unclassified", conjugator=u, match_residual=match)
    return Classification("fourier", {"exponents": exps}, u, match)


def _classify_sphere(core, tol: float) -> Classification | None:
    for k in range(4):
        ck = _rotate(core, k)
        if abs(ck[1] - ck[0].conj()) > tol or abs(ck[3] - ck[2].conj()) > tol:
            continue
        if any(abs(q.w + 0.25) > tol for q in ck):
            continue
        u = normalize_to_complex(ck[0])
        canon = [group_conj(u, q) for q in ck]
        t = math.atan2(canon[2].z, canon[2].y)
        match = _max_diff(canon, order5_sphere_core(t, 1))
        if match <= tol:
            return Classification("sphere_family", {"t": t, "shift": k}, u, match)
    return None


def _classify_oneparam(core, tol: float) -> Classification | None:
    best = None
    for k in range(4):
        ck = _rotate(core, k)
        a0 = (ck[0].w + ck[2].w - 1.0 - ck[1].w - ck[3].w) / 4.0
        if not (A0_MIN - tol <= a0 <= A0_MAX + tol):
            continue
        a0 = min(max(a0, A0_MIN), A0_MAX)
        u = normalize_pair(ck[1], ck[3])
        canon = [group_conj(u, q) for q in ck]
        s_d = -1 if canon[3].y < 0 else 1
        match = _max_diff(canon, order5_oneparam_core(a0, s_d, "principal"))
        if best is None or match < best.match_residual:
            best = Classification("one_param", {"a0": a0, "s_d": s_d, "shift": k}, u, match)
        if match <= tol:
            return best
    return None


def classify_order5(core, tol: float = CLASSIFY_TOL) -> Classification:
    """Label an order-5 circulant core as fourier, sphere_family or one_param.

    Fourier: all entries commute and, made complex, are fifth roots of
    unity.  Sphere family: some cyclic shift has the pattern (A, conj A,
    C, conj C) with real parts -1/4; t is read off in the frame where A
    is complex with positive i part.  One-parameter family: some shift,
    brought to standard position by ``normalize_pair`` on its b and d
    entries, matches the principal-root generator at the a0 given by the
    real parts.
    """
    core = tuple(q if isinstance(q, Quaternion) else Quaternion.from_array(q) for q in core)
    res = residual_norm(5, core)
    if res > 1e-6:
        raise DomainError(f"core is not a Hadamard circulant core (residual {res:.3g})")
    for attempt in (_classify_fourier, _classify_sphere, _classify_oneparam):
        found = attempt(core, tol)
        if found is not None and found.label != "unclassified":
            return found
    return Classification("unclassified")


def classify(order: int, core, tol: float = CLASSIFY_TOL) -> Classification:
    core = tuple(q if isinstance(q, Quaternion) else Quaternion.from_array(q) for q in core)
    if order == 3:
        return classify_order3(core, tol)
    if order == 4:
        return classify_order4(core, tol)
    if order == 5:
        return classify_order5(core, tol)
    raise DomainError(f"order must be one of {ORDERS}, got {order}")


def fingerprint(core, digits: float = 1e-6) -> tuple:
    """Sorted (Re, |Im|) pairs; invariant under conjugation and core rotation."""
    return tuple(sorted((round(q.w / digits), round(q.imag_norm() / digits)) for q in core))


@dataclass
class CirculantSolution:
    order: int
    core: tuple
    residual: float
    label: str
    params: dict
    conjugator: Quaternion
    match_residual: float
    restart: int

    @property
    def fingerprint(self) -> tuple:
        return fingerprint(self.core)


@dataclass
class SolveResult:
    order: int
    restarts: int
    seed: int
    converged: int
    solutions: list
    label_counts: Counter

    @property
    def dropped(self) -> int:
        return self.restarts - self.converged

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self) -> int:
        return len(self.solutions)


def _run_restart(args) -> CirculantSolution | None:
    order, seed, index = args
    rng = restart_rng(seed, index)
    out = levenberg_marquardt(order, random_core(order, rng).ravel())
    if not out.converged:
        return None
    core = tuple(Quaternion.from_array(q) for q in out.x.reshape(-1, 4))
    cls = classify(order, core)
    return CirculantSolution(
        order, core, out.residual, cls.label, cls.params, cls.conjugator, cls.match_residual, index
    )


def solve_circulant(order: int, restarts: int, seed: int, workers: int = 1) -> SolveResult:
    """Multi-start least squares on the circulant-core equations.

    Converged restarts (residual <= 1e-8) are classified, then reduced to
    one representative per fingerprint (lowest restart index wins).
    """
    _core_len(order)
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    jobs = [(order, seed, i) for i in range(restarts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            found = list(pool.map(_run_restart, jobs, chunksize=16))
    else:
        found = [_run_restart(j) for j in jobs]
    converged = [s for s in found if s is not None]
    counts = Counter(s.label for s in converged)
    unique = {}
    for s in converged:
        unique.setdefault(s.fingerprint, s)
    solutions = [unique[k] for k in sorted(unique)]
    return SolveResult(order, restarts, seed, len(converged), solutions, counts)
