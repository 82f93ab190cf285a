"""Spin-1/2 operators, Bell and Werner states, twirling and fidelity."""
from __future__ import annotations

import enum

import numpy as np

from .exceptions import ContractViolation
from .numerics import QuantumState, check_capacity, partial_trace

# index 0 is |0> = |down>, so sz = diag(-1/2, +1/2)
SX = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
SY = np.array([[0, 0.5j], [-0.5j, 0]], dtype=complex)
SZ = np.array([[-0.5, 0], [0, 0.5]], dtype=complex)
SPIN_OPERATORS = (SX, SY, SZ)

_SQ2 = 1 / np.sqrt(2)


class BellLabel(enum.IntEnum):
    """Bell states indexed so that ``value == 2*k + l`` for ``Psi_kl``."""

    PHI_PLUS = 0
    PHI_MINUS = 1
    PSI_PLUS = 2
    PSI_MINUS = 3

    @property
    def bits(self) -> tuple[int, int]:
        """``(k, l)``: k flags a Psi state, l the relative minus sign."""
        return divmod(int(self), 2)

    @classmethod
    def from_bits(cls, k: int, l: int) -> BellLabel:
        return cls(2 * (k % 2) + (l % 2))

    @property
    def symbol(self) -> str:
        return ("Phi+", "Phi-", "Psi+", "Psi-")[int(self)]


# rows are the Bell kets in BellLabel order
BELL_VECTORS = np.array(
    [
        [_SQ2, 0, 0, _SQ2],
        [_SQ2, 0, 0, -_SQ2],
        [0, _SQ2, _SQ2, 0],
        [0, _SQ2, -_SQ2, 0],
    ],
    dtype=complex,
)


def embed(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    """Place a single-spin operator at ``site`` (1-based) of an ``n_spins`` register."""
    op = np.asarray(op)
    if op.shape != (2, 2):
        raise ContractViolation(f"embed expects a 2x2 operator, got {op.shape}")
    if not 1 <= site <= n_spins:
        raise ContractViolation(f"site {site} out of range 1..{n_spins}")
    check_capacity(n_spins)
    left = np.eye(2 ** (site - 1))
    right = np.eye(2 ** (n_spins - site))
    return np.kron(np.kron(left, op), right)


def bell_state(label: BellLabel) -> QuantumState:
    return QuantumState.pure(BELL_VECTORS[BellLabel(label)])


def bell_product_basis(n_pairs: int) -> np.ndarray:
    """Rows are Bell-product kets; row index has pair 1 as the most significant base-4 digit."""
    check_capacity(2 * n_pairs)
    basis = np.ones((1, 1), dtype=complex)
    for _ in range(n_pairs):
        basis = np.kron(basis, BELL_VECTORS)
    return basis


def werner_density(fidelity: float) -> np.ndarray:
    if not 0.0 <= fidelity <= 1.0:
        raise ContractViolation(f"Werner fidelity must lie in [0, 1], got {fidelity}")
    weights = np.array([fidelity] + [(1.0 - fidelity) / 3.0] * 3)
    return bell_diagonal(weights)


def werner_state(fidelity: float) -> QuantumState:
    """Werner state with weight ``fidelity`` on Phi+ and the rest shared equally."""
    return QuantumState.mixed(werner_density(fidelity))


def bell_diagonal(weights) -> np.ndarray:
    """Two-spin density operator with the given Bell weights (BellLabel order)."""
    weights = np.asarray(weights, dtype=float)
    return BELL_VECTORS.T @ np.diag(weights) @ BELL_VECTORS.conj()


def bell_weights(state: QuantumState) -> np.ndarray:
    """Diagonal of a two-spin state in the Bell basis."""
    if state.n_spins != 2:
        raise ContractViolation(f"expected a two-spin state, got {state.n_spins} spins")
    if state.is_pure:
        return np.abs(BELL_VECTORS.conj() @ state.data) ** 2
    return np.real(np.einsum("ki,ij,kj->k", BELL_VECTORS.conj(), state.data, BELL_VECTORS))


def twirl(state: QuantumState) -> QuantumState:
    """Deterministic twirl: Bell-dephase, then equalize the three non-Phi+ weights.

    This is the average over random bilateral rotations; it keeps the Phi+
    weight and the trace of the input.
    """
    w = bell_weights(state)
    minor = (w[1] + w[2] + w[3]) / 3.0
    return QuantumState.mixed(bell_diagonal([w[0], minor, minor, minor]))


def fidelity_to_bell(state: QuantumState, label: BellLabel = BellLabel.PHI_PLUS, normalize: bool = False) -> float:
    """Overlap ``<B|rho|B>`` with a Bell state (no square root).

    Raises :class:`ContractViolation` for unnormalized input unless
    ``normalize`` is set.
    """
    if state.n_spins != 2:
        raise ContractViolation(f"expected a two-spin state, got {state.n_spins} spins")
    w = state.weight
    if abs(w - 1.0) > 1e-9:
        if not normalize:
            raise ContractViolation(f"state weight {w:.3g} is not 1; pass normalize=True")
        state = state.normalized()
    return float(bell_weights(state)[BellLabel(label)])


def is_maximally_entangled(state: QuantumState, tol: float = 1e-9) -> bool:
    """True iff both single-spin marginals of a two-spin ket are ``I/2``."""
    if not state.is_pure:
        raise ContractViolation("is_maximally_entangled needs a pure state")
    if state.n_spins != 2:
        raise ContractViolation(f"expected a two-spin state, got {state.n_spins} spins")
    half = np.eye(2) / 2
    return all(
        np.max(np.abs(partial_trace(state, [site]).data - half)) <= tol for site in (1, 2)
    )
