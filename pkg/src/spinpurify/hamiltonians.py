"""Exchange Hamiltonians for the two parallel chains held by Alice and Bob.

A chain of spins evolves under

    H = -sum_<i,j> (jx Sx_i Sx_j + jy Sy_i Sy_j + jz Sz_i Sz_j) + d . (S_i x S_j)

over nearest-neighbour edges in chain order with open boundaries. The
overall minus sign makes ``jx = jy = jz = J > 0`` ferromagnetic.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import ContractViolation
from .numerics import check_capacity
from .spin_system import BellLabel, SX, SY, SZ, bell_product_basis, embed


@dataclass(frozen=True)
class CouplingSpec:
    jx: float = 1.0
    jy: float = 1.0
    jz: float = 1.0
    dm: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "jx", float(self.jx))
        object.__setattr__(self, "jy", float(self.jy))
        object.__setattr__(self, "jz", float(self.jz))
        dm = tuple(float(x) for x in self.dm)
        if len(dm) != 3:
            raise ContractViolation(f"DM vector needs 3 components, got {len(dm)}")
        object.__setattr__(self, "dm", dm)

    @classmethod
    def isotropic(cls, j: float = 1.0) -> CouplingSpec:
        return cls(j, j, j)

    @classmethod
    def xy_dm(cls, j: float, d: Sequence[float]) -> CouplingSpec:
        """XY exchange ``-J(SxSx + SySy)`` plus a DM vector."""
        return cls(j, j, 0.0, tuple(d))

    @property
    def has_dm(self) -> bool:
        return any(x != 0.0 for x in self.dm)

    @property
    def is_isotropic(self) -> bool:
        return self.jx == self.jy == self.jz and not self.has_dm


@dataclass(frozen=True)
class ChainLayout:
    """``n_pairs`` shared pairs; pair j occupies global sites (2j-1, 2j).

    Alice holds the odd sites and Bob the even ones; each side forms an open
    chain in increasing site order.
    """

    n_pairs: int

    def __post_init__(self):
        if self.n_pairs < 1:
            raise ContractViolation(f"n_pairs must be >= 1, got {self.n_pairs}")

    @property
    def n_spins(self) -> int:
        return 2 * self.n_pairs

    @property
    def alice_sites(self) -> list[int]:
        return list(range(1, self.n_spins + 1, 2))

    @property
    def bob_sites(self) -> list[int]:
        return list(range(2, self.n_spins + 1, 2))

    def pair(self, j: int) -> tuple[int, int]:
        if not 1 <= j <= self.n_pairs:
            raise ContractViolation(f"pair index {j} out of range 1..{self.n_pairs}")
        return (2 * j - 1, 2 * j)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Serializable description of a bilateral Hamiltonian."""

    n_pairs: int
    coupling: CouplingSpec = field(default_factory=CouplingSpec)

    def to_json(self) -> str:
        c = self.coupling
        doc = {"n_pairs": self.n_pairs, "jx": c.jx, "jy": c.jy, "jz": c.jz, "d": list(c.dm)}
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> HamiltonianSpec:
        doc = json.loads(text)
        try:
            coupling = CouplingSpec(doc["jx"], doc["jy"], doc["jz"], tuple(doc.get("d", (0, 0, 0))))
            return cls(int(doc["n_pairs"]), coupling)
        except KeyError as exc:
            raise ContractViolation(f"HamiltonianSpec JSON is missing {exc}") from None

    def build(self) -> np.ndarray:
        return bilateral_hamiltonian(ChainLayout(self.n_pairs), self.coupling)


def chain_hamiltonian(sites: Sequence[int], coupling: CouplingSpec, n_spins: int) -> np.ndarray:
    """Exchange Hamiltonian of one open chain visiting ``sites`` in order."""
    sites = list(sites)
    if len(set(sites)) != len(sites):
        raise ContractViolation(f"duplicate sites in chain {sites}")
    check_capacity(n_spins)
    dim = 2**n_spins
    h = np.zeros((dim, dim), dtype=complex)
    dx, dy, dz = coupling.dm
    for i, j in zip(sites, sites[1:]):
        xi, yi, zi = (embed(op, i, n_spins) for op in (SX, SY, SZ))
        xj, yj, zj = (embed(op, j, n_spins) for op in (SX, SY, SZ))
        h -= coupling.jx * xi @ xj + coupling.jy * yi @ yj + coupling.jz * zi @ zj
        if coupling.has_dm:
            h += dx * (yi @ zj - zi @ yj) + dy * (zi @ xj - xi @ zj) + dz * (xi @ yj - yi @ xj)
    return h


def bilateral_hamiltonian(layout: ChainLayout, coupling: CouplingSpec) -> np.ndarray:
    """Sum of Alice's and Bob's chain Hamiltonians on ``2 * n_pairs`` spins."""
    n = layout.n_spins
    return chain_hamiltonian(layout.alice_sites, coupling, n) + chain_hamiltonian(layout.bob_sites, coupling, n)


def _pl(a: BellLabel, b: BellLabel) -> int:
    return 4 * int(a) + int(b)


_P, _M, _S, _A = BellLabel.PHI_PLUS, BellLabel.PHI_MINUS, BellLabel.PSI_PLUS, BellLabel.PSI_MINUS

# Bell-product subspaces left invariant by any two-pair XYZ exchange
INVARIANT_SUBSPACES: dict[str, tuple[int, ...]] = {
    "Phi+Phi-,Phi-Phi+": (_pl(_P, _M), _pl(_M, _P)),
    "Phi+Psi+,Psi+Phi+": (_pl(_P, _S), _pl(_S, _P)),
    "Phi+Psi-,Psi-Phi+": (_pl(_P, _A), _pl(_A, _P)),
    "Psi+Psi-,Psi-Psi+": (_pl(_S, _A), _pl(_A, _S)),
    "Psi+Phi-,Phi-Psi+": (_pl(_S, _M), _pl(_M, _S)),
    "Psi-Phi-,Phi-Psi-": (_pl(_A, _M), _pl(_M, _A)),
    "Phi+Phi+,Phi-Phi-,Psi+Psi+,Psi-Psi-": (_pl(_P, _P), _pl(_M, _M), _pl(_S, _S), _pl(_A, _A)),
}


@dataclass(frozen=True)
class InvariantSubspaceReport:
    applicable: bool
    leakage: dict[str, float]
    note: str = ""

    @property
    def max_leakage(self) -> float:
        return max(self.leakage.values(), default=0.0)

    def as_dict(self) -> dict:
        return asdict(self)


def invariant_subspace_check(coupling: CouplingSpec) -> InvariantSubspaceReport:
    """Largest matrix element coupling each listed subspace to its complement.

    Uses the two-pair layout. Not applicable when a DM term is present.
    """
    if coupling.has_dm:
        return InvariantSubspaceReport(False, {}, "DM term present; subspace structure not claimed")
    h = bilateral_hamiltonian(ChainLayout(2), coupling)
    basis = bell_product_basis(2)
    hb = basis.conj() @ h @ basis.T
    leakage = {}
    for name, members in INVARIANT_SUBSPACES.items():
        rest = [k for k in range(16) if k not in members]
        leakage[name] = float(np.max(np.abs(hb[np.ix_(members, rest)])))
    return InvariantSubspaceReport(True, leakage)
