import itertools

import numpy as np
import pytest

from spinpurify.exceptions import ContractViolation
from spinpurify.hamiltonians import (
    INVARIANT_SUBSPACES,
    ChainLayout,
    CouplingSpec,
    HamiltonianSpec,
    bilateral_hamiltonian,
    chain_hamiltonian,
    invariant_subspace_check,
)
from spinpurify.numerics import propagator
from spinpurify.spin_system import SX, SY, SZ, embed


def pauli_string_hamiltonian(edges, coupling, n):
    """Independent assembly from Pauli strings and the Levi-Civita symbol."""
    paulis = [2 * SX, 2 * SY, 2 * SZ]
    dim = 2**n

    def two_site(a, i, b, j):
        ops = [np.eye(2)] * n
        ops[i - 1] = paulis[a]
        ops[j - 1] = paulis[b]
        out = np.eye(1)
        for op in ops:
            out = np.kron(out, op)
        return out / 4

    js = (coupling.jx, coupling.jy, coupling.jz)
    h = np.zeros((dim, dim), dtype=complex)
    for i, j in edges:
        for a in range(3):
            h -= js[a] * two_site(a, i, a, j)
        for k, a, b in itertools.permutations(range(3)):
            sign = 1 if (k, a, b) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1
            h += sign * coupling.dm[k] * two_site(a, i, b, j)
    return h


def test_single_site_is_zero():
    assert not np.any(chain_hamiltonian([1], CouplingSpec.isotropic(1.0), 1))


def test_two_site_isotropic_spectrum():
    h = chain_hamiltonian([1, 2], CouplingSpec.isotropic(1.0), 2)
    np.testing.assert_allclose(np.linalg.eigvalsh(h), [-0.25, -0.25, -0.25, 0.75], atol=1e-14)


def test_dm_term_matches_brute_force():
    c = CouplingSpec.xy_dm(1.0, (0.1, 0.0, 0.0))
    h = chain_hamiltonian([1, 2], c, 2)
    assert np.max(np.abs(h - h.conj().T)) < 1e-15
    np.testing.assert_allclose(h, pauli_string_hamiltonian([(1, 2)], c, 2), atol=1e-15)


def test_random_couplings_match_brute_force(rng):
    for _ in range(5):
        c = CouplingSpec(*rng.uniform(-2, 2, 3), tuple(rng.uniform(-1, 1, 3)))
        h = chain_hamiltonian([1, 3, 5], c, 6)
        np.testing.assert_allclose(h, pauli_string_hamiltonian([(1, 3), (3, 5)], c, 6), atol=1e-14)


def test_hermitian_for_random_couplings(rng):
    for _ in range(20):
        c = CouplingSpec(*rng.normal(size=3), tuple(rng.normal(size=3)))
        h = chain_hamiltonian([1, 2, 3], c, 3)
        assert np.max(np.abs(h - h.conj().T)) < 1e-14


def test_duplicate_sites():
    with pytest.raises(ContractViolation):
        chain_hamiltonian([1, 2, 1], CouplingSpec(), 3)


def test_isotropic_flag():
    assert CouplingSpec.isotropic(2.0).is_isotropic
    assert not CouplingSpec(1, 1, 0.5).is_isotropic
    assert not CouplingSpec(1, 1, 1, (0.1, 0, 0)).is_isotropic


def test_layout():
    layout = ChainLayout(3)
    assert layout.alice_sites == [1, 3, 5]
    assert layout.bob_sites == [2, 4, 6]
    assert layout.pair(2) == (3, 4)
    with pytest.raises(ContractViolation):
        layout.pair(4)
    with pytest.raises(ContractViolation):
        ChainLayout(0)


def test_one_pair_is_zero():
    assert not np.any(bilateral_hamiltonian(ChainLayout(1), CouplingSpec.isotropic(1.0)))


def test_two_pair_propagator_factorizes():
    c = CouplingSpec.isotropic(1.0)
    layout = ChainLayout(2)
    t = 1.3
    u = propagator(bilateral_hamiltonian(layout, c), t)
    ha = chain_hamiltonian(layout.alice_sites, c, 4)
    hb = chain_hamiltonian(layout.bob_sites, c, 4)
    assert np.max(np.abs(ha @ hb - hb @ ha)) < 1e-15
    # sites ordered (1,2,3,4); reorder Alice (1,3) and Bob (2,4) blocks
    ua = propagator(chain_hamiltonian([1, 2], c, 2), t)
    ub = propagator(chain_hamiltonian([1, 2], c, 2), t)
    prod = np.kron(ua, ub).reshape([2] * 8)
    prod = prod.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(16, 16)
    assert np.max(np.abs(u - prod)) < 1e-10


def test_three_pair_traceless():
    h = bilateral_hamiltonian(ChainLayout(3), CouplingSpec.isotropic(1.0))
    assert h.shape == (64, 64)
    assert np.max(np.abs(h - h.conj().T)) < 1e-15
    assert abs(np.trace(h)) < 1e-12


def test_xxz_conserves_total_sz(rng):
    for _ in range(5):
        j, jz = rng.normal(size=2)
        h = bilateral_hamiltonian(ChainLayout(3), CouplingSpec(j, j, jz))
        sz_total = sum(embed(SZ, k, 6) for k in range(1, 7))
        assert np.max(np.abs(h @ sz_total - sz_total @ h)) < 1e-13


def test_xyz_conserves_sz_parity(rng):
    parity = np.diag([(-1) ** bin(i).count("1") for i in range(64)])
    h = bilateral_hamiltonian(ChainLayout(3), CouplingSpec(*rng.normal(size=3)))
    assert np.max(np.abs(h @ parity - parity @ h)) < 1e-13


def test_two_pair_terms_commute(rng):
    jx, jy, jz = rng.normal(size=3)
    terms = []
    for i, j in ((1, 3), (2, 4)):
        for coeff, op in ((jx, SX), (jy, SY), (jz, SZ)):
            terms.append(coeff * embed(op, i, 4) @ embed(op, j, 4))
    for a, b in itertools.combinations(terms, 2):
        assert np.max(np.abs(a @ b - b @ a)) < 1e-14


def test_isotropic_three_pair_commutes_with_side_spin():
    h = bilateral_hamiltonian(ChainLayout(3), CouplingSpec.isotropic(1.0))
    for side in ([1, 3, 5], [2, 4, 6]):
        for op in (SX, SY, SZ):
            total = sum(embed(op, k, 6) for k in side)
            assert np.max(np.abs(h @ total - total @ h)) < 1e-13


def test_invariant_subspaces_partition_basis():
    members = sorted(k for sub in INVARIANT_SUBSPACES.values() for k in sub)
    assert members == list(range(16))


@pytest.mark.parametrize("coupling", [CouplingSpec.isotropic(1.0), CouplingSpec(0.3, 1.7, -0.4)])
def test_invariant_subspace_check(coupling):
    report = invariant_subspace_check(coupling)
    assert report.applicable
    assert len(report.leakage) == 7
    assert report.max_leakage < 1e-12


def test_invariant_subspace_check_random(rng):
    for _ in range(20):
        assert invariant_subspace_check(CouplingSpec(*rng.uniform(-2, 2, 3))).max_leakage < 1e-12


def test_invariant_subspace_check_with_dm():
    report = invariant_subspace_check(CouplingSpec(1, 1, 1, (0.1, 0, 0)))
    assert not report.applicable
    assert report.leakage == {}


def test_hamiltonian_spec_json_roundtrip():
    spec = HamiltonianSpec(3, CouplingSpec(1.0, 1.0, 0.0, (0.1, 0.0, 0.0)))
    text = spec.to_json()
    assert '"d": [0.1, 0.0, 0.0]' in text
    again = HamiltonianSpec.from_json(text)
    assert again == spec
    np.testing.assert_allclose(again.build(), bilateral_hamiltonian(ChainLayout(3), spec.coupling))


def test_hamiltonian_spec_json_missing_key():
    with pytest.raises(ContractViolation):
        HamiltonianSpec.from_json('{"n_pairs": 2, "jx": 1}')

