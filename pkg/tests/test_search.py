import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhadamard.families import (
    A0_MAX,
    A0_MIN,
    f2_tensor_f2,
    fourier_quat,
    order3,
    order5_oneparam_core,
    order5_sphere_core,
)
from qhadamard.qmat import EquivalenceMove, apply_move, core_row, is_circulant_core
from qhadamard.quat import ONE, DomainError, Quaternion, group_conj
from qhadamard.search import (
    LABELS,
    circulant_residual,
    classify,
    classify_order3,
    classify_order4,
    classify_order5,
    fingerprint,
    jacobian,
    jacobian_central,
    levenberg_marquardt,
    residual_norm,
    restart_rng,
    solve_circulant,
)

from conftest import random_unit

# columns ordered as 2^q and rows as 2^-p mod 5: entry w^(2^(q-p)) makes the core circulant
_F5 = apply_move(fourier_quat(5), EquivalenceMove.row_permutation([0, 1, 3, 4, 2]))
_F5 = apply_move(_F5, EquivalenceMove.col_permutation([0, 1, 2, 4, 3]))
assert is_circulant_core(_F5, 1e-12)
F5_CORE = core_row(_F5)
F2F2_CORE = core_row(apply_move(f2_tensor_f2(), EquivalenceMove.row_permutation([0, 1, 3, 2])))


def conj_core(u, core):
    return tuple(group_conj(u, q) for q in core)


def family_cores():
    yield 3, core_row(order3(0.4, 1.3))
    yield 4, F2F2_CORE
    yield 5, F5_CORE
    for t in (0.0, 1.1, -2.0):
        yield 5, order5_sphere_core(t, 1)
        yield 5, order5_sphere_core(t, -1)
    for a0 in np.linspace(A0_MIN, A0_MAX, 7):
        for s in (1, -1):
            yield 5, order5_oneparam_core(a0, s)


def test_residual_examples():
    assert np.max(np.abs(circulant_residual(5, F5_CORE))) <= 1e-12
    assert np.max(np.abs(circulant_residual(5, order5_sphere_core(1.1)))) <= 1e-12
    bumped = list(order5_sphere_core(1.1))
    bumped[2] = bumped[2] + Quaternion(0, 0, 0.1)
    assert residual_norm(5, bumped) >= 0.05


def test_residual_layout_order5():
    a, b, c, d = order5_sphere_core(0.7)
    r = circulant_residual(5, (a, b, c, d))
    assert len(r) == 4 + 4 + 8
    a, b, c, d = (Quaternion(*np.random.default_rng(k).standard_normal(4)) for k in range(4))
    r = circulant_residual(5, (a, b, c, d))
    assert np.allclose(r[:4], [abs(q) ** 2 - 1 for q in (a, b, c, d)])
    assert np.allclose(r[4:8], (1 + a + b + c + d).as_array())
    e1 = 1 + a * d.conj() + b * a.conj() + c * b.conj() + d * c.conj()
    e2 = 1 + a * c.conj() + b * d.conj() + c * a.conj() + d * b.conj()
    assert np.allclose(r[8:12], e1.as_array())
    assert np.allclose(r[12:16], e2.as_array())


def test_residual_layout_orders_3_4():
    rng = np.random.default_rng(1)
    a, b, c = (Quaternion(*rng.standard_normal(4)) for _ in range(3))
    r = circulant_residual(4, (a, b, c))
    assert np.allclose(r[7:11], (1 + a * c.conj() + b * a.conj() + c * b.conj()).as_array())
    r = circulant_residual(3, (a, b))
    assert np.allclose(r[6:10], (1 + a * b.conj() + b * a.conj()).as_array())


def test_residual_errors():
    with pytest.raises(DomainError):
        circulant_residual(6, F5_CORE)
    with pytest.raises(DomainError):
        circulant_residual(5, F5_CORE[:3])


def test_family_cores_solve():
    for order, core in family_cores():
        assert residual_norm(order, core) <= 1e-10


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_residual_conjugation_invariant(seed):
    rng = np.random.default_rng(seed)
    u = random_unit(rng)
    core = tuple(Quaternion(*v) for v in rng.standard_normal((4, 4)))
    assert residual_norm(5, conj_core(u, core)) == pytest.approx(residual_norm(5, core), abs=1e-12, rel=1e-12)


@pytest.mark.parametrize("order", [3, 4, 5])
def test_jacobian_matches_central_differences(order):
    rng = np.random.default_rng(order)
    for _ in range(5):
        x = rng.standard_normal(4 * (order - 1))
        J, Jc = jacobian(order, x), jacobian_central(order, x)
        assert np.max(np.abs(J - Jc)) <= 1e-6 * max(1.0, np.max(np.abs(J)))


def test_lm_recovers_perturbed_solution():
    x0 = np.array([q.as_array() for q in order5_sphere_core(0.3)]).ravel()
    x0 += 1e-2 * np.random.default_rng(3).standard_normal(x0.size)
    out = levenberg_marquardt(5, x0)
    assert out.converged and out.residual <= 1e-8


def test_lm_respects_max_iter():
    out = levenberg_marquardt(5, np.random.default_rng(0).standard_normal(16), max_iter=1)
    assert out.iterations == 1


def test_restart_streams():
    a = restart_rng(7, 3).standard_normal(5)
    assert np.array_equal(a, restart_rng(7, 3).standard_normal(5))
    assert not np.array_equal(a, restart_rng(7, 4).standard_normal(5))


def test_classify_examples():
    c = classify_order5(F5_CORE)
    assert c.label == "fourier"
    c = classify_order5(order5_sphere_core(0.4))
    assert c.label == "sphere_family"
    t = c.params["t"]
    # t is read up to the reflection that flips the k part
    assert min(abs(math.remainder(t - 0.4, 2 * math.pi)), abs(math.remainder(t + 0.4, 2 * math.pi))) <= 1e-6
    c = classify_order5(order5_oneparam_core(0.1, 1, "principal"))
    assert c.label == "one_param"
    assert c.params["a0"] == pytest.approx(0.1, abs=1e-6)


def test_classify_anchor_points():
    assert classify_order5(order5_oneparam_core(-0.25)).label == "sphere_family"
    for a0 in (A0_MIN, A0_MAX):
        assert classify_order5(order5_oneparam_core(a0)).label == "fourier"


def test_classify_rejects_non_solutions():
    with pytest.raises(DomainError):
        classify_order5((ONE, ONE, ONE, ONE))
    with pytest.raises(DomainError):
        classify(6, F5_CORE)


def test_classify_order3_and_4():
    c = classify_order3(core_row(order3(0.4, 1.3)))
    assert c.label == "order3_family"
    assert c.params["theta"] == pytest.approx(0.4) and c.params["phi"] == pytest.approx(1.3)
    assert classify_order3((ONE, ONE)).label == "unclassified"
    c = classify_order4(F2F2_CORE)
    assert c.label == "f2_tensor_f2" and c.params["core_signs"] == [-1, 1, -1]
    assert classify_order4((ONE, Quaternion(0, 1), ONE)).label == "unclassified"


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(A0_MIN + 1e-3, A0_MAX - 1e-3), st.integers(0, 3))
def test_classify_stable_under_conjugation_and_rotation(seed, a0, k):
    rng = np.random.default_rng(seed)
    u = random_unit(rng)
    base = order5_oneparam_core(a0, int(rng.choice([1, -1])))
    base = base[k:] + base[:k]
    ref = classify_order5(base)
    moved = classify_order5(conj_core(u, base))
    assert moved.label == ref.label
    if ref.label == "one_param":
        assert moved.params["a0"] == pytest.approx(ref.params["a0"], abs=1e-6)
    for core in (order5_sphere_core(rng.uniform(-3, 3)), F5_CORE):
        assert classify_order5(conj_core(u, core)).label == classify_order5(core).label


@given(st.integers(0, 2**32 - 1), st.integers(0, 3))
def test_fingerprint_invariance(seed, k):
    rng = np.random.default_rng(seed)
    core = tuple(Quaternion(*v) for v in rng.standard_normal((4, 4)))
    rotated = core[k:] + core[:k]
    assert fingerprint(conj_core(random_unit(rng), rotated)) == fingerprint(core)


def test_solve_small_runs():
    r3 = solve_circulant(3, 20, 11)
    assert r3.converged >= 10
    assert set(r3.label_counts) == {"order3_family"}
    r4 = solve_circulant(4, 20, 11)
    assert set(r4.label_counts) == {"f2_tensor_f2"}
    assert all(s.residual <= 1e-8 for s in r4)
    assert len(r4) == len({s.fingerprint for s in r4})


def test_solve_deterministic_and_parallel_equal():
    a = solve_circulant(5, 12, 5)
    b = solve_circulant(5, 12, 5)
    c = solve_circulant(5, 12, 5, workers=2)
    for other in (b, c):
        assert [s.fingerprint for s in a] == [s.fingerprint for s in other]
        assert [s.restart for s in a] == [s.restart for s in other]
        for s, t in zip(a, other, strict=True):
            assert np.array_equal(
                np.array([q.as_array() for q in s.core]), np.array([q.as_array() for q in t.core])
            )
    assert set(a.label_counts) <= set(LABELS) - {"unclassified"}
    assert a.dropped == a.restarts - a.converged


def test_solve_errors():
    with pytest.raises(DomainError):
        solve_circulant(6, 1, 0)
    with pytest.raises(ValueError):
        solve_circulant(5, 0, 0)


@pytest.mark.parametrize("a0", [0.1, -0.3, -0.6])
def test_oneparam_label_invariant_under_core_rotation(a0):
    for root, expect in (("principal", a0), ("degenerate", -0.5 - a0)):
        core = order5_oneparam_core(a0, 1, root)
        for k in range(4):
            c = classify_order5(core[k:] + core[:k])
            assert c.label == "one_param"
            assert c.params["a0"] == pytest.approx(expect, abs=1e-9)
