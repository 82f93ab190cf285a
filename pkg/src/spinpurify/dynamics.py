"""Unitary evolution, projective Sz measurement and Bell-basis dephasing."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import ContractViolation
from .numerics import QuantumState, _site_axes, propagator
from .spin_system import bell_product_basis

# branches lighter than this are dropped from measurement records
ZERO_PROBABILITY = 1e-12


@dataclass(frozen=True)
class MeasurementRecord:
    sites: tuple[int, ...]
    outcomes: tuple[int, ...]
    probability: float
    post_state: QuantumState


def apply_unitary(state: QuantumState, u: np.ndarray) -> QuantumState:
    u = np.asarray(u)
    if u.shape != (state.dim, state.dim):
        raise ContractViolation(f"operator shape {u.shape} does not match state dimension {state.dim}")
    if state.is_pure:
        return QuantumState.pure(u @ state.data)
    return QuantumState.mixed(u @ state.data @ u.conj().T)


def evolve(state: QuantumState, h: np.ndarray, t: float) -> QuantumState:
    """Evolve ``state`` for time ``t`` under ``h`` (hbar = 1)."""
    h = np.asarray(h)
    if h.shape != (state.dim, state.dim):
        raise ContractViolation(f"Hamiltonian shape {h.shape} does not match state dimension {state.dim}")
    if t == 0:
        return state
    return apply_unitary(state, propagator(h, t))


def _project(state: QuantumState, axes: list[int], outcome: Sequence[int]) -> QuantumState:
    """Unnormalized state of the unmeasured spins after the given outcome."""
    n = state.n_spins
    if state.is_pure:
        psi = state.data.reshape([2] * n)
        index = tuple(outcome[axes.index(k)] if k in axes else slice(None) for k in range(n))
        return QuantumState.pure(np.asarray(psi[index]).reshape(-1))
    rho = state.data.reshape([2] * (2 * n))
    index = tuple(outcome[axes.index(k % n)] if k % n in axes else slice(None) for k in range(2 * n))
    d = 2 ** (n - len(axes))
    return QuantumState.mixed(np.asarray(rho[index]).reshape(d, d))


def measure_sz(
    state: QuantumState,
    sites: Sequence[int],
    outcomes: Iterable[Sequence[int]] | None = None,
) -> list[MeasurementRecord]:
    """Projective Sz measurement of ``sites`` (1-based).

    Returns one record per outcome tuple (0 = down, 1 = up, aligned with
    ``sites``) whose Born probability exceeds ``ZERO_PROBABILITY``. Each
    ``post_state`` is the normalized state of the remaining spins in
    increasing site order; pure input gives pure post-states.

    ``outcomes`` restricts the enumeration to the listed tuples.
    """
    axes = _site_axes(sites, state.n_spins)
    total = state.weight
    if outcomes is None:
        outcomes = itertools.product((0, 1), repeat=len(axes))
    records = []
    for outcome in outcomes:
        outcome = tuple(int(o) for o in outcome)
        if len(outcome) != len(axes) or any(o not in (0, 1) for o in outcome):
            raise ContractViolation(f"outcome {outcome} does not match sites {list(sites)}")
        branch = _project(state, axes, outcome)
        p = branch.weight / total
        if p <= ZERO_PROBABILITY:
            continue
        records.append(MeasurementRecord(tuple(sites), outcome, p, branch.normalized()))
    return records


def bell_dephase(state: QuantumState) -> np.ndarray:
    """Bell-product weights of a state of ``2k`` spins paired as (1,2), (3,4), ...

    Index ``sum_j label_j * 4**(k-j)`` with pair 1 most significant and
    labels in :class:`~spinpurify.spin_system.BellLabel` order.
    """
    n = state.n_spins
    if n % 2:
        raise ContractViolation(f"bell_dephase needs an even spin count, got {n}")
    basis = bell_product_basis(n // 2)
    if state.is_pure:
        w = np.abs(basis.conj() @ state.data) ** 2
    else:
        w = np.real(np.einsum("ki,ij,kj->k", basis.conj(), state.data, basis))
    return w / state.weight
