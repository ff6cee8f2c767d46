import math

import numpy as np
import pytest

from qhadamard.families import f2_tensor_f2, fourier_quat, order3, order5_noncirculant, order5_sphere
from qhadamard.qmat import (
    EquivalenceMove,
    QMatrix,
    apply_move,
    apply_moves,
    circulant_from_row,
    commuting_core_test,
    compliance_check_complex,
    compliance_check_real,
    complex_adjoint,
    core_row,
    dephase,
    entrywise_conj,
    hadamard_check,
    is_circulant_core,
    is_dephased,
    lift_from_complex,
    lift_from_real,
    real_adjoint,
)
from qhadamard.quat import I, J, K, ONE, DomainError, Quaternion, group_conj

from conftest import random_unit

F2 = QMatrix.from_complex([[1, 1], [1, -1]])
SIGN4 = np.array([[1, 1, -1, 1], [1, -1, -1, -1], [1, -1, 1, 1], [1, 1, 1, -1]], dtype=float)


def random_qmatrix(rng, n):
    return QMatrix(rng.standard_normal((n, n, 4)))


def random_unitary(rng, n):
    """D1 (H / sqrt n) D2 for a quaternionic Fourier H and random unit diagonals."""
    H = fourier_quat(n, rng.uniform(0, 6), rng.uniform(0, 3)).scale(1 / math.sqrt(n))
    return apply_moves(
        H,
        [
            EquivalenceMove.left_diagonal([random_unit(rng) for _ in range(n)]),
            EquivalenceMove.right_diagonal([random_unit(rng) for _ in range(n)]),
        ],
    )


def test_f2_check():
    rep = hadamard_check(F2)
    assert rep.passed and rep.max_dev == 0.0


def test_halved_entry_fails():
    d = F2.data.copy()
    d[1, 1] *= 0.5
    rep = hadamard_check(QMatrix(d))
    assert not rep.passed
    assert rep.entry_norm_dev == pytest.approx(0.5)


def test_noncirculant_passes():
    assert hadamard_check(order5_noncirculant(0.0)).passed


def _oracle_devs(H):
    """Gram deviations recomputed through chi and complex matmul."""
    n = H.order
    chi = complex_adjoint(H)
    out = []
    for G in (chi @ chi.conj().T, chi.conj().T @ chi):
        # quaternion (G0 + G1 j) entrywise modulus from the top block row
        mod = np.sqrt(np.abs(G[:n, :n]) ** 2 + np.abs(G[:n, n:]) ** 2)
        np.fill_diagonal(mod, 0.0)
        out.append(mod.max())
    return out


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_check_matches_adjoint_oracle(rng, n):
    for H in (random_qmatrix(rng, n), fourier_quat(n, 0.3, 1.1), order5_sphere(0.2)):
        rep = hadamard_check(H)
        row, col = _oracle_devs(H)
        assert rep.gram_row_dev == pytest.approx(row, rel=1e-12, abs=1e-12)
        assert rep.gram_col_dev == pytest.approx(col, rel=1e-12, abs=1e-12)
        norms = np.sqrt((H.data**2).sum(-1))
        assert rep.entry_norm_dev == pytest.approx(np.max(np.abs(norms - 1)), abs=1e-15)
        assert rep.passed == (max(rep.entry_norm_dev, row, col) <= 1e-9)


def test_product_matches_adjoint(rng):
    for n in (1, 2, 3):
        A, B = random_qmatrix(rng, n), random_qmatrix(rng, n)
        assert np.allclose(complex_adjoint(A @ B), complex_adjoint(A) @ complex_adjoint(B), atol=1e-12)


def test_adjoint_algebra(rng):
    for n in (1, 2, 3):
        for _ in range(20):
            A, B = random_qmatrix(rng, n), random_qmatrix(rng, n)
            cA, cB = complex_adjoint(A), complex_adjoint(B)
            assert np.max(np.abs(complex_adjoint(A @ B) - cA @ cB)) <= 1e-12
            assert np.max(np.abs(complex_adjoint(A.conj_transpose()) - cA.conj().T)) <= 1e-12
            assert np.max(np.abs(complex_adjoint(A + B) - (cA + cB))) <= 1e-12


def test_adjoint_examples():
    assert np.array_equal(complex_adjoint(QMatrix.from_entries([[J]])), np.array([[0, 1], [-1, 0]]))
    assert np.array_equal(complex_adjoint(QMatrix.identity(3)), np.eye(6))
    assert np.array_equal(real_adjoint(QMatrix.from_entries([[Quaternion(1, 1, 1, 1)]])), SIGN4)
    psi = real_adjoint(QMatrix.identity(2))
    assert np.array_equal(psi @ psi.T, np.eye(8))


def test_real_adjoint_orthogonal_for_unitary(rng):
    for n in (1, 2, 3):
        U = random_unitary(rng, n)
        assert (U @ U.conj_transpose()).allclose(QMatrix.identity(n), 1e-12)
        psi = real_adjoint(U)
        assert np.max(np.abs(psi @ psi.T - np.eye(4 * n))) <= 1e-10


def test_chi_gram_identity_forces_gram_identity(rng):
    # chi(AA*) = nI forces AA* = nI
    for n in (2, 3, 4):
        H = fourier_quat(n, rng.uniform(0, 6), rng.uniform(0, 3))
        G = H @ H.conj_transpose()
        assert np.allclose(complex_adjoint(G), n * np.eye(2 * n), atol=1e-12)
        assert G.allclose(QMatrix.identity(n).scale(n), 1e-12)
        A = random_qmatrix(rng, n)
        G = A @ A.conj_transpose()
        assert not np.allclose(complex_adjoint(G), n * np.eye(2 * n), atol=1e-3)


def test_lift_from_complex():
    M = np.array([[1, 1], [-1, 1]], dtype=complex)
    A = lift_from_complex(M)
    assert A.allclose(QMatrix.from_entries([[Quaternion(1, 0, 1, 0) / math.sqrt(2)]]), 1e-15)
    rep = hadamard_check(A, 1e-12)
    assert rep.passed and rep.max_dev <= 1e-12
    assert np.allclose(complex_adjoint(A), M / math.sqrt(2), atol=1e-15)


def test_lift_from_complex_roundtrip(rng):
    for n in (1, 2, 3, 4):
        H = apply_move(
            fourier_quat(n),
            EquivalenceMove.left_diagonal(
                [Quaternion.from_complex(np.exp(1j * rng.uniform(0, 6))) for _ in range(n)]
            ),
        )
        # right-multiplying by (1+j)/sqrt 2 splits each complex entry evenly over chi's blocks
        w = Quaternion(1, 0, 1, 0) / math.sqrt(2)
        Hw = apply_move(H, EquivalenceMove.right_diagonal([w] * n))
        M = math.sqrt(2) * complex_adjoint(Hw)
        assert compliance_check_complex(M)
        L = lift_from_complex(M)
        assert L.allclose(Hw, 1e-12)
        assert hadamard_check(L, 1e-10).passed
        assert np.allclose(complex_adjoint(L), M / math.sqrt(2), atol=1e-12)
        assert np.max(np.abs(np.sqrt((L.data**2).sum(-1)) - 1)) <= 1e-10


def test_lift_errors():
    F2c = np.array([[1, 1], [1, -1]], dtype=complex)
    with pytest.raises(DomainError):
        lift_from_complex(F2c)  # Hadamard but not compliant
    with pytest.raises(DomainError):
        lift_from_complex(np.eye(2))
    with pytest.raises(DomainError):
        lift_from_complex(np.eye(3))
    with pytest.raises(DomainError):
        lift_from_real(np.eye(4))
    with pytest.raises(DomainError):
        lift_from_real(np.eye(2))
    with pytest.raises(DomainError):
        compliance_check_complex(np.eye(3))
    with pytest.raises(DomainError):
        compliance_check_real(np.eye(6))


def test_lift_from_real():
    A = lift_from_real(SIGN4)
    assert A.allclose(QMatrix.from_entries([[Quaternion(1, 1, 1, 1) / 2]]), 1e-15)
    rep = hadamard_check(A, 1e-12)
    assert rep.passed and rep.max_dev <= 1e-12


def test_lift_from_real_psi_image():
    H = QMatrix.from_entries([[ONE, ONE], [ONE, Quaternion(-1)]])
    w = Quaternion(1, 1, 1, 1) / 2
    Hw = apply_move(H, EquivalenceMove.right_diagonal([w, w]))
    M = 2 * real_adjoint(Hw)
    assert hadamard_check(lift_from_real(M), 1e-12).passed
    assert lift_from_real(M).allclose(Hw, 1e-12)


def test_compliance(rng):
    A = random_qmatrix(rng, 3)
    assert compliance_check_complex(complex_adjoint(A))
    assert compliance_check_real(real_adjoint(A))
    F4 = fourier_quat(4).to_complex()
    assert not compliance_check_complex(F4)


def test_moves_identity_and_preservation(rng):
    H = fourier_quat(4, 0.4, 1.2)
    n = H.order
    ident = [
        EquivalenceMove.row_permutation(range(n)),
        EquivalenceMove.col_permutation(range(n)),
        EquivalenceMove.left_diagonal([ONE] * n),
        EquivalenceMove.right_diagonal([ONE] * n),
        EquivalenceMove.conjugation(ONE),
    ]
    assert apply_moves(H, ident) == H
    for m in (
        EquivalenceMove.row_permutation([2, 0, 3, 1]),
        EquivalenceMove.col_permutation([3, 2, 1, 0]),
        EquivalenceMove.left_diagonal([random_unit(rng) for _ in range(n)]),
        EquivalenceMove.right_diagonal([random_unit(rng) for _ in range(n)]),
        EquivalenceMove.conjugation(random_unit(rng)),
    ):
        out = apply_move(H, m)
        assert hadamard_check(out, 1e-12).passed
        assert apply_move(out, m.inverse()).allclose(H, 1e-12)
    bad = F2.data.copy()
    bad[0, 0] *= 0.5
    assert not hadamard_check(apply_move(QMatrix(bad), EquivalenceMove.conjugation(random_unit(rng)))).passed


def test_move_semantics():
    H = QMatrix.from_entries([[ONE, I], [J, K]])
    out = apply_move(H, EquivalenceMove.left_diagonal([J, ONE]))
    assert out[0, 1] == J * I
    out = apply_move(H, EquivalenceMove.right_diagonal([ONE, J]))
    assert out[1, 1] == K * J
    out = apply_move(H, EquivalenceMove.row_permutation([1, 0]))
    assert out[0, 0] == J
    u = Quaternion(1, 0, 1, 0) / math.sqrt(2)
    out = apply_move(H, EquivalenceMove.conjugation(u))
    assert out[0, 1].isclose(group_conj(u, I), 1e-15)


def test_move_errors():
    with pytest.raises(ValueError):
        apply_move(F2, EquivalenceMove.row_permutation([0, 0]))
    with pytest.raises(ValueError):
        apply_move(F2, EquivalenceMove.row_permutation([0, 1, 2]))
    with pytest.raises(ValueError):
        apply_move(F2, EquivalenceMove.left_diagonal([ONE, Quaternion(2)]))
    with pytest.raises(ValueError):
        apply_move(F2, EquivalenceMove.right_diagonal([ONE]))
    with pytest.raises(ValueError):
        apply_move(F2, EquivalenceMove.conjugation(Quaternion(0.5)))


def test_conjugation_keeps_dephased(rng):
    H = order5_sphere(0.7)
    assert is_dephased(H)
    assert is_dephased(apply_move(H, EquivalenceMove.conjugation(random_unit(rng))), 1e-12)


def test_dephase_examples():
    out, left, right = dephase(F2)
    assert out == F2
    assert all(d == ONE for d in left.diag) and all(d == ONE for d in right.diag)
    H = QMatrix.from_entries([[ONE, I], [J, K]])
    out, _, _ = dephase(H)
    assert out.allclose(F2, 1e-12)


def test_dephase_generic_2x2(rng):
    a, b, c = (random_unit(rng) for _ in range(3))
    H = QMatrix.from_entries([[a, b], [c, random_unit(rng)]])
    out, _, _ = dephase(H)
    assert out[0, 0].isclose(ONE, 1e-12) and out[0, 1].isclose(ONE, 1e-12) and out[1, 0].isclose(ONE, 1e-12)
    # for a Hadamard 2x2 the corner is forced to -1
    d = -(c * a.inv() * b)
    Hh = QMatrix.from_entries([[a, b], [c, d]])
    assert hadamard_check(Hh, 1e-12).passed
    assert dephase(Hh)[0][1, 1].isclose(Quaternion(-1), 1e-12)


def test_dephase_recovers(rng):
    H = fourier_quat(5, 1.0, 0.4)
    H = apply_moves(
        H,
        [
            EquivalenceMove.left_diagonal([random_unit(rng) for _ in range(5)]),
            EquivalenceMove.right_diagonal([random_unit(rng) for _ in range(5)]),
        ],
    )
    out, left, right = dephase(H)
    assert is_dephased(out, 1e-12)
    # the returned moves are the ones applied; their inverses undo them
    assert apply_moves(H, [left, right]).allclose(out, 1e-12)
    assert apply_moves(out, [right.inverse(), left.inverse()]).allclose(H, 1e-12)


def test_circulant_from_row():
    a, b, c, d = (Quaternion(float(k)) for k in range(1, 5))
    H = circulant_from_row([a, b, c, d])
    assert [H[2, j] for j in range(1, 5)] == [d, a, b, c]
    assert [H[0, j] for j in range(5)] == [ONE] * 5
    assert circulant_from_row([Quaternion(-1)]) == F2
    assert is_circulant_core(H)
    assert core_row(H) == (a, b, c, d)
    assert not is_circulant_core(order5_noncirculant(0.0))
    with pytest.raises(ValueError):
        circulant_from_row([])


def test_order3_circulant_shape():
    H = order3(0.3, 1.2)
    assert is_circulant_core(H)
    assert H[2, 1] == H[1, 2]


def test_f2f2_circulant_depends_on_ordering():
    H = f2_tensor_f2()
    assert is_dephased(H)
    assert not is_circulant_core(H)
    # reordering the last two rows gives the circulant core (-1, 1, -1)
    P = apply_move(H, EquivalenceMove.row_permutation([0, 1, 3, 2]))
    assert is_dephased(P) and is_circulant_core(P)
    assert core_row(P) == (Quaternion(-1), ONE, Quaternion(-1))


def test_commuting_core(rng):
    F5 = fourier_quat(5)
    assert commuting_core_test(F5)
    assert commuting_core_test(entrywise_conj(random_unit(rng), F5), 1e-12)
    assert not commuting_core_test(order5_sphere(0.0))
    assert not commuting_core_test(QMatrix.from_entries([[ONE, I], [J, K]]))
