"""Dense complex linear algebra for small spin registers.

Operators are plain ``numpy.ndarray`` objects of shape ``(2**n, 2**n)``.
States are wrapped in :class:`QuantumState`, which is either a ket or a
density operator and may carry an unnormalized weight (the probability
mass of a conditional branch).

Basis convention: site 1 is the most significant bit of the computational
index, and ``|0> = |down>``, ``|1> = |up>``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import CapacityError, ContractViolation, ConvergenceError

DEFAULT_MAX_SPINS = 10
MAX_SPINS_ENV = "SPINPURIFY_MAX_SPINS"


@dataclass
class Tolerances:
    """Numerical tolerances used by contract checks; mutate to override."""

    hermitian: float = 1e-12
    unitary: float = 1e-10
    normalization: float = 1e-12
    positivity: float = 1e-10
    jacobi_offdiag: float = 1e-13
    jacobi_max_sweeps: int = 60


TOL = Tolerances()


def max_spins() -> int:
    """Spin cap, read from ``SPINPURIFY_MAX_SPINS`` on every call."""
    raw = os.environ.get(MAX_SPINS_ENV)
    if raw is None:
        return DEFAULT_MAX_SPINS
    try:
        value = int(raw)
    except ValueError:
        raise CapacityError(f"{MAX_SPINS_ENV}={raw!r} is not an integer") from None
    if value < 1:
        raise CapacityError(f"{MAX_SPINS_ENV} must be positive, got {value}")
    return value


def spin_count(dim: int) -> int:
    """Number of spins for a Hilbert space of dimension ``dim``."""
    n = int(dim).bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise ContractViolation(f"dimension {dim} is not a power of two")
    return n


def check_capacity(n_spins: int) -> None:
    cap = max_spins()
    if n_spins > cap:
        raise CapacityError(f"{n_spins} spins exceeds the cap of {cap} ({MAX_SPINS_ENV})")


def _square(a: np.ndarray, name: str = "operator") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolation(f"{name} must be square, got shape {a.shape}")
    return a


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with a spin-capacity check."""
    a = _square(a, "a")
    b = _square(b, "b")
    check_capacity(spin_count(a.shape[0]) + spin_count(b.shape[0]))
    return np.kron(a, b)


def kron_all(ops: Sequence[np.ndarray]) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for op in ops:
        out = kron(out, op)
    return out


def is_hermitian(h: np.ndarray, tol: float | None = None) -> bool:
    tol = TOL.hermitian if tol is None else tol
    h = np.asarray(h)
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= tol)


def is_unitary(u: np.ndarray, tol: float | None = None) -> bool:
    tol = TOL.unitary if tol is None else tol
    u = _square(u)
    dev = u @ u.conj().T - np.eye(u.shape[0])
    return bool(np.max(np.abs(dev), initial=0.0) <= tol)


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def hermitian_eig(h: np.ndarray, tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    h : np.ndarray
        Hermitian matrix.
    tol : float, optional
        Off-diagonal Frobenius norm at which the sweep stops, relative to
        ``max(1, ||h||_F)``. Defaults to ``TOL.jacobi_offdiag``.

    Returns
    -------
    eigenvalues : np.ndarray
        Real eigenvalues in ascending order.
    eigenvectors : np.ndarray
        Unitary matrix whose columns are the matching eigenvectors, so that
        ``h = V @ diag(eigenvalues) @ V.conj().T``.
    """
    h = _square(h, "h")
    if not is_hermitian(h):
        raise ContractViolation("hermitian_eig requires a Hermitian matrix")
    n = h.shape[0]
    a = np.array(h, dtype=complex)
    v = np.eye(n, dtype=complex)
    tol = TOL.jacobi_offdiag if tol is None else tol
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    for _ in range(TOL.jacobi_max_sweeps):
        if _offdiag_norm(a) < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                # phase-rotate column q so a[p, q] is real, then a real Jacobi rotation
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(theta) + math.hypot(theta, 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        if _offdiag_norm(a) >= threshold:
            raise ConvergenceError(f"Jacobi did not converge in {TOL.jacobi_max_sweeps} sweeps")

    evals = np.real(np.diag(a))
    order = np.argsort(evals, kind="stable")
    return evals[order], v[:, order]


def spectral_propagator(evals: np.ndarray, evecs: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` from a precomputed eigendecomposition of ``H``."""
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def propagator(h: np.ndarray, t: float) -> np.ndarray:
    """Unitary ``exp(-i h t)`` with hbar = 1."""
    evals, evecs = hermitian_eig(h)
    return spectral_propagator(evals, evecs, t)


@dataclass(frozen=True)
class QuantumState:
    """Pure (ket) or mixed (density operator) state of ``n_spins`` spins.

    ``weight`` is the squared norm of a ket or the trace of a density
    operator; it is below one for an unnormalized conditional branch.
    """

    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.data, dtype=complex)
        if arr.ndim == 1:
            spin_count(arr.shape[0])
        elif arr.ndim == 2:
            _square(arr, "density")
            spin_count(arr.shape[0])
            if not is_hermitian(arr, max(TOL.hermitian, TOL.hermitian * np.abs(arr).max(initial=0.0))):
                raise ContractViolation("density operator is not Hermitian")
        else:
            raise ContractViolation(f"state data must be 1-D or 2-D, got {arr.ndim}-D")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def pure(cls, amplitudes) -> QuantumState:
        amps = np.asarray(amplitudes)
        if amps.ndim != 1:
            raise ContractViolation("pure state amplitudes must be a vector")
        return cls(amps)

    @classmethod
    def mixed(cls, density) -> QuantumState:
        rho = np.asarray(density)
        if rho.ndim != 2:
            raise ContractViolation("density operator must be a matrix")
        return cls(rho)

    @property
    def kind(self) -> str:
        return "pure" if self.data.ndim == 1 else "mixed"

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def n_spins(self) -> int:
        return spin_count(self.dim)

    @property
    def weight(self) -> float:
        if self.is_pure:
            return float(np.vdot(self.data, self.data).real)
        return float(np.trace(self.data).real)

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return np.array(self.data)

    def as_mixed(self) -> QuantumState:
        return self if not self.is_pure else QuantumState(self.density())

    def normalized(self) -> QuantumState:
        w = self.weight
        if w <= 0.0:
            raise ContractViolation("cannot normalize a state of zero weight")
        if self.is_pure:
            return QuantumState(self.data / np.sqrt(w))
        return QuantumState(self.data / w)

    def is_physical(self, tol: float | None = None) -> bool:
        """Positive semidefinite (mixed) check; kets are always physical."""
        if self.is_pure:
            return True
        tol = TOL.positivity if tol is None else tol
        return bool(np.linalg.eigvalsh(self.data).min() >= -tol)


def _site_axes(sites: Sequence[int], n: int, name: str = "sites") -> list[int]:
    sites = list(sites)
    if len(set(sites)) != len(sites):
        raise ContractViolation(f"{name} must be distinct, got {sites}")
    for s in sites:
        if not 1 <= s <= n:
            raise ContractViolation(f"site {s} out of range 1..{n}")
    return [s - 1 for s in sites]


def partial_trace(state: QuantumState, keep_sites: Sequence[int]) -> QuantumState:
    """Reduced density operator on ``keep_sites`` (1-based, output in given order)."""
    n = state.n_spins
    keep = _site_axes(keep_sites, n, "keep_sites")
    if not keep:
        raise ContractViolation("keep_sites must not be empty")
    drop = [k for k in range(n) if k not in keep]
    if state.is_pure:
        psi = state.data.reshape([2] * n)
        psi = np.transpose(psi, keep + drop).reshape(2 ** len(keep), -1)
        return QuantumState(psi @ psi.conj().T)
    rho = state.data.reshape([2] * (2 * n))
    rho = np.transpose(rho, keep + drop + [n + k for k in keep] + [n + k for k in drop])
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    rho = rho.reshape(dk, dd, dk, dd)
    return QuantumState(np.einsum("ajbj->ab", rho))
