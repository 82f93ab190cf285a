"""Purification protocols driven by free chain dynamics, and the BBPSSW reference.

Times are dimensionless (``J t`` with the isotropic coupling ``J``).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import MeasurementRecord, apply_unitary, measure_sz
from .exceptions import ContractViolation, DegenerateInputError
from .hamiltonians import ChainLayout, CouplingSpec, bilateral_hamiltonian, chain_hamiltonian
from .numerics import QuantumState, hermitian_eig, kron_all, spectral_propagator
from .spin_system import BellLabel, fidelity_to_bell, twirl, werner_density

TWO_PI = 2.0 * math.pi

# measured sites and the pair left unmeasured
SITE_SETS: dict[str, tuple[tuple[int, ...], int]] = {
    "3456": ((3, 4, 5, 6), 1),
    "1256": ((1, 2, 5, 6), 2),
}
ACCEPTED_PATTERNS = ((0, 0, 1, 1), (1, 1, 0, 0))
REJECTED_PATTERNS = ((0, 0, 0, 0), (1, 1, 1, 1))
COINCIDENT_PAIR = ((0, 0), (1, 1))


@dataclass(frozen=True)
class ProtocolOutcome:
    kept_pair: int
    post_state: QuantumState
    fidelity: float
    success_probability: float
    accepted_patterns: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    branches: tuple[MeasurementRecord, ...] = field(default=(), repr=False)

    def to_record(self, f_in: float, t: float | None = None, site_set: str | None = None) -> dict:
        return {
            "F_in": f_in,
            "t": t,
            "site_set": site_set,
            "F_out": self.fidelity,
            "p_success": self.success_probability,
            "patterns": [{"sites": list(s), "outcome": list(o)} for s, o in self.accepted_patterns],
        }


@dataclass(frozen=True)
class PureFilterSpec:
    """Partially entangled pair ``alpha|00> + beta|11>`` with ``0 < alpha < beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if abs(self.alpha**2 + self.beta**2 - 1.0) > 1e-12:
            raise ContractViolation("alpha**2 + beta**2 must equal 1")
        if self.alpha == 0.0:
            raise DegenerateInputError("alpha = 0 leaves no entanglement to concentrate")
        if not 0.0 < self.alpha < self.beta - 1e-12:
            raise ContractViolation(f"need 0 < alpha < beta, got alpha={self.alpha}, beta={self.beta}")

    @classmethod
    def from_alpha(cls, alpha: float) -> PureFilterSpec:
        if not 0.0 <= alpha <= 1.0:
            raise ContractViolation(f"alpha must lie in [0, 1], got {alpha}")
        return cls(alpha, math.sqrt(1.0 - alpha * alpha))

    @property
    def optimal_time(self) -> float:
        """``J t_max = 2 arccos(alpha / beta)``."""
        return 2.0 * math.acos(self.alpha / self.beta)


@functools.lru_cache(maxsize=64)
def bilateral_spectrum(n_pairs: int, coupling: CouplingSpec) -> tuple[np.ndarray, np.ndarray]:
    """Cached eigendecomposition of the bilateral Hamiltonian."""
    evals, evecs = hermitian_eig(bilateral_hamiltonian(ChainLayout(n_pairs), coupling))
    evals.flags.writeable = False
    evecs.flags.writeable = False
    return evals, evecs


def bilateral_propagator(n_pairs: int, coupling: CouplingSpec, t: float) -> np.ndarray:
    return spectral_propagator(*bilateral_spectrum(n_pairs, coupling), t)


def werner_product(fidelity: float, n_pairs: int) -> QuantumState:
    return QuantumState.mixed(kron_all([werner_density(fidelity)] * n_pairs))


def _check_fidelity(fidelity: float) -> None:
    if not 0.0 <= fidelity <= 1.0:
        raise ContractViolation(f"fidelity must lie in [0, 1], got {fidelity}")


def postselect(
    state: QuantumState,
    sites: Sequence[int],
    patterns: Sequence[Sequence[int]],
    kept_pair: int,
) -> ProtocolOutcome:
    """Measure ``sites``, keep the listed outcome patterns and mix their branches."""
    records = measure_sz(state, sites, outcomes=patterns)
    p_total = sum(r.probability for r in records)
    if p_total <= 0.0:
        raise DegenerateInputError("none of the accepted outcome patterns can occur")
    rho = sum(r.probability * r.post_state.density() for r in records) / p_total
    post = QuantumState.mixed(rho)
    return ProtocolOutcome(
        kept_pair=kept_pair,
        post_state=post,
        fidelity=fidelity_to_bell(post, BellLabel.PHI_PLUS),
        success_probability=float(p_total),
        accepted_patterns=tuple((tuple(sites), tuple(p)) for p in patterns),
        branches=tuple(records),
    )


def pure_filter(spec: PureFilterSpec, t: float | str = "optimal", j: float = 1.0) -> ProtocolOutcome:
    """Concentrate a pure pair by coupling an ancilla to spin 1 and measuring it.

    The ancilla starts in ``|0>`` as spin 3 and interacts with spin 1 under
    the isotropic exchange ``j``; outcome 0 on spin 3 is accepted. With
    ``t="optimal"`` the measurement happens at ``|j| t = 2 arccos(alpha/beta)``.
    """
    if t == "optimal":
        t = spec.optimal_time / abs(j)
    psi = np.zeros(8, dtype=complex)
    psi[0b000] = spec.alpha
    psi[0b110] = spec.beta
    h = chain_hamiltonian([1, 3], CouplingSpec.isotropic(j), 3)
    state = apply_unitary(QuantumState.pure(psi), spectral_propagator(*hermitian_eig(h), float(t)))
    records = measure_sz(state, [3], outcomes=[(0,)])
    if not records:
        raise DegenerateInputError("outcome 0 on the ancilla has zero probability")
    rec = records[0]
    return ProtocolOutcome(
        kept_pair=1,
        post_state=rec.post_state,
        fidelity=fidelity_to_bell(rec.post_state, BellLabel.PHI_PLUS),
        success_probability=rec.probability,
        accepted_patterns=(((3,), (0,)),),
        branches=(rec,),
    )


def three_pair_run(
    fidelity: float,
    t: float,
    site_set: str = "3456",
    patterns: Sequence[Sequence[int]] = ACCEPTED_PATTERNS,
    coupling: CouplingSpec | None = None,
) -> ProtocolOutcome:
    """Three Werner pairs, free bilateral evolution, post-selection on four spins."""
    _check_fidelity(fidelity)
    if site_set not in SITE_SETS:
        raise ContractViolation(f"site_set must be one of {sorted(SITE_SETS)}, got {site_set!r}")
    coupling = CouplingSpec.isotropic(1.0) if coupling is None else coupling
    sites, kept = SITE_SETS[site_set]
    u = bilateral_propagator(3, coupling, float(t))
    state = apply_unitary(werner_product(fidelity, 3), u)
    return postselect(state, sites, patterns, kept)


def three_pair_protocol(
    fidelity: float, t: float, site_set: str = "3456", coupling: CouplingSpec | None = None
) -> ProtocolOutcome:
    """Accept outcomes (0,0,1,1) and (1,1,0,0) on ``site_set``."""
    return three_pair_run(fidelity, t, site_set, ACCEPTED_PATTERNS, coupling)


def three_pair_rejected_patterns(
    fidelity: float, t: float, site_set: str = "3456", coupling: CouplingSpec | None = None
) -> ProtocolOutcome:
    """Same run accepting (0,0,0,0) and (1,1,1,1) instead."""
    return three_pair_run(fidelity, t, site_set, REJECTED_PATTERNS, coupling)


def two_pair_protocol(fidelity: float, coupling: CouplingSpec, t: float) -> ProtocolOutcome:
    """Two Werner pairs; coincident Sz outcomes on sites 3 and 4 are accepted."""
    _check_fidelity(fidelity)
    u = bilateral_propagator(2, coupling, float(t))
    state = apply_unitary(werner_product(fidelity, 2), u)
    return postselect(state, (3, 4), COINCIDENT_PAIR, 1)


def cnot(control: int, target: int, n_spins: int) -> np.ndarray:
    dim = 2**n_spins
    u = np.zeros((dim, dim), dtype=complex)
    cbit = 1 << (n_spins - control)
    tbit = 1 << (n_spins - target)
    for i in range(dim):
        u[i ^ tbit if i & cbit else i, i] = 1.0
    return u


def bilateral_cnot() -> np.ndarray:
    """CNOT 1->3 on Alice's side times CNOT 2->4 on Bob's side."""
    return cnot(1, 3, 4) @ cnot(2, 4, 4)


def bbpssw_reference(fidelity: float, check_regime: bool = True) -> ProtocolOutcome:
    """One BBPSSW round on two Werner pairs, by simulation.

    Bilateral CNOT from pair 1 onto pair 2, Sz measurement of pair 2,
    coincident outcomes kept, and the surviving pair twirled back to Werner
    form. ``check_regime=False`` allows ``fidelity <= 1/2``.
    """
    _check_fidelity(fidelity)
    if check_regime and fidelity <= 0.5:
        raise DegenerateInputError(f"BBPSSW does not purify at F={fidelity} <= 1/2")
    state = apply_unitary(werner_product(fidelity, 2), bilateral_cnot())
    out = postselect(state, (3, 4), COINCIDENT_PAIR, 1)
    twirled = twirl(out.post_state)
    return ProtocolOutcome(
        kept_pair=1,
        post_state=twirled,
        fidelity=fidelity_to_bell(twirled, BellLabel.PHI_PLUS),
        success_probability=out.success_probability,
        accepted_patterns=out.accepted_patterns,
        branches=out.branches,
    )


PROTOCOLS = ("three_pair", "bbpssw")


def round_map(protocol: str, fidelity: float) -> ProtocolOutcome:
    if protocol == "three_pair":
        return three_pair_protocol(fidelity, TWO_PI)
    if protocol == "bbpssw":
        return bbpssw_reference(fidelity, check_regime=False)
    raise ContractViolation(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")


def iterate(protocol: str, f0: float, rounds: int) -> list[tuple[float, float]]:
    """Feed each round's output fidelity into a fresh round.

    Returns ``rounds + 1`` entries ``(fidelity, success_probability)``; the
    first is ``(f0, 1.0)`` and the last holds the final fidelity.
    """
    if f0 <= 0.5:
        raise DegenerateInputError(f"iteration needs F0 > 1/2, got {f0}")
    if rounds < 0:
        raise ContractViolation(f"rounds must be >= 0, got {rounds}")
    history = [(float(f0), 1.0)]
    f = f0
    for _ in range(rounds):
        out = round_map(protocol, f)
        f = out.fidelity
        history.append((f, out.success_probability))
    return history
