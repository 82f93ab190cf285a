import numpy as np
import pytest

from spinpurify.exceptions import CapacityError, ContractViolation
from spinpurify.numerics import (
    QuantumState,
    hermitian_eig,
    is_unitary,
    kron,
    partial_trace,
    propagator,
)
from spinpurify.spin_system import BELL_VECTORS, SX, SZ, werner_density

from conftest import basis_ket, random_density, random_hermitian

I2 = np.eye(2)
PX = 2 * SX


def test_kron_identity():
    assert np.array_equal(kron(I2, I2), np.eye(4))


def test_kron_eigenvector():
    op = kron(SZ, I2)
    ket = basis_ket("10")
    np.testing.assert_allclose(op @ ket, 0.5 * ket)


def test_kron_pauli_algebra():
    xx = kron(PX, PX)
    assert np.trace(xx) == 0
    np.testing.assert_allclose(xx @ xx, np.eye(4))


def test_kron_index_layout(rng):
    a = rng.normal(size=(2, 2))
    b = rng.normal(size=(4, 4))
    out = kron(a, b)
    for i, j, k, l in np.ndindex(2, 2, 4, 4):
        assert out[i * 4 + k, j * 4 + l] == a[i, j] * b[k, l]


def test_kron_associative(rng):
    # integer entries keep every product exact
    a, b, c = (rng.integers(-9, 9, size=(2, 2)) for _ in range(3))
    assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


def test_kron_capacity(monkeypatch):
    monkeypatch.setenv("SPINPURIFY_MAX_SPINS", "3")
    kron(np.eye(4), I2)
    with pytest.raises(CapacityError):
        kron(np.eye(4), np.eye(4))


def test_kron_default_capacity():
    with pytest.raises(CapacityError):
        kron(np.eye(2**6), np.eye(2**5))


def test_eig_diagonal():
    vals, vecs = hermitian_eig(np.diag([1.0, 3.0]))
    np.testing.assert_allclose(vals, [1, 3])
    np.testing.assert_allclose(np.abs(vecs), np.eye(2))


def test_eig_pauli_x():
    vals, _ = hermitian_eig(PX)
    np.testing.assert_allclose(vals, [-1, 1], atol=1e-14)


def test_eig_two_spin_ferromagnet():
    # -S1.S2 by hand: triplet at -1/4, singlet at +3/4
    h = -sum(np.kron(s, s) for s in (SX, 0.5 * np.array([[0, 1j], [-1j, 0]]), SZ))
    vals, _ = hermitian_eig(h)
    np.testing.assert_allclose(vals, [-0.25, -0.25, -0.25, 0.75], atol=1e-14)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


@pytest.mark.parametrize("dim", [2, 4, 8, 16, 32, 64])
def test_eig_matches_lapack(rng, dim):
    h = random_hermitian(rng, dim)
    vals, vecs = hermitian_eig(h)
    assert np.all(np.diff(vals) >= 0)
    np.testing.assert_allclose(vals, np.linalg.eigvalsh(h), atol=1e-10)
    assert np.max(np.abs(vecs @ np.diag(vals) @ vecs.conj().T - h)) < 1e-9
    assert is_unitary(vecs)


def test_eig_trace(rng):
    for _ in range(20):
        h = random_hermitian(rng, 8)
        vals, _ = hermitian_eig(h)
        assert abs(vals.sum() - np.trace(h).real) < 1e-10


def test_propagator_zero_time(rng):
    np.testing.assert_allclose(propagator(random_hermitian(rng, 8), 0.0), np.eye(8), atol=1e-12)


def test_propagator_inverse(rng):
    h = random_hermitian(rng, 8)
    np.testing.assert_allclose(propagator(h, 0.7) @ propagator(h, -0.7), np.eye(8), atol=1e-10)


def test_propagator_group_property(rng):
    for _ in range(100):
        dim = 2 ** rng.integers(1, 5)
        h = random_hermitian(rng, dim)
        s, t = rng.uniform(-3, 3, size=2)
        err = np.max(np.abs(propagator(h, s + t) - propagator(h, s) @ propagator(h, t)))
        assert err < 1e-9


def test_propagator_two_spin_exchange():
    sy = 0.5 * np.array([[0, 1j], [-1j, 0]])
    h = -sum(np.kron(s, s) for s in (SX, sy, SZ))
    for t in (0.3, 1.1, 2.5):
        out = propagator(h, t) @ basis_ket("10")
        expected = np.exp(-1j * t / 4) * (np.cos(t / 2) * basis_ket("10") + 1j * np.sin(t / 2) * basis_ket("01"))
        np.testing.assert_allclose(out, expected, atol=1e-12)


def test_partial_trace_bell_marginal():
    state = QuantumState.pure(BELL_VECTORS[0])
    np.testing.assert_allclose(partial_trace(state, [1]).data, np.eye(2) / 2, atol=1e-15)


def test_partial_trace_product_werner():
    w = werner_density(0.7)
    state = QuantumState.mixed(np.kron(w, w))
    np.testing.assert_allclose(partial_trace(state, [1, 2]).data, w, atol=1e-15)


def test_partial_trace_pure_marginal():
    a, b = 0.6, 0.8
    psi = a * basis_ket("000") + b * basis_ket("110")
    reduced = partial_trace(QuantumState.pure(psi), [1, 2]).data
    target = a * basis_ket("00") + b * basis_ket("11")
    np.testing.assert_allclose(reduced, np.outer(target, target), atol=1e-15)


def test_partial_trace_composition(rng):
    for _ in range(10):
        state = QuantumState.mixed(random_density(rng, 16))
        two_step = partial_trace(partial_trace(state, [1, 2, 4]), [1, 3])
        direct = partial_trace(state, [1, 4])
        np.testing.assert_allclose(two_step.data, direct.data, atol=1e-12)


def test_partial_trace_preserves_weight(rng):
    rho = 0.3 * random_density(rng, 8)
    assert abs(partial_trace(QuantumState.mixed(rho), [2]).weight - 0.3) < 1e-12


def test_partial_trace_errors():
    state = QuantumState.pure(basis_ket("00"))
    with pytest.raises(ContractViolation):
        partial_trace(state, [])
    with pytest.raises(ContractViolation):
        partial_trace(state, [1, 1])
    with pytest.raises(ContractViolation):
        partial_trace(state, [3])


def test_state_weight_and_kind(rng):
    psi = QuantumState.pure(0.5 * basis_ket("01"))
    assert psi.kind == "pure" and abs(psi.weight - 0.25) < 1e-12
    rho = QuantumState.mixed(random_density(rng, 4))
    assert rho.kind == "mixed" and abs(rho.weight - 1) < 1e-12
    assert rho.is_physical()
    assert not QuantumState.mixed(np.diag([1.5, -0.5])).is_physical()


def test_state_is_immutable():
    state = QuantumState.pure(basis_ket("0"))
    with pytest.raises(ValueError):
        state.data[0] = 2


def test_state_rejects_bad_shapes():
    with pytest.raises(ContractViolation):
        QuantumState.pure(np.ones(3))
    with pytest.raises(ContractViolation):
        QuantumState.mixed(np.array([[1, 1], [0, 1]]))
