"""Closed forms, fidelity curves, timing windows, Bell-label information and resources."""
from __future__ import annotations

import csv
import functools
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import entropy

from .dynamics import bell_dephase
from .exceptions import ContractViolation, DegenerateInputError, DivergenceError
from .hamiltonians import ChainLayout, CouplingSpec
from .numerics import QuantumState
from .protocols import (
    TWO_PI,
    bbpssw_reference,
    bilateral_cnot,
    bilateral_propagator,
    three_pair_protocol,
)
from .spin_system import BELL_VECTORS, BellLabel

# uniform grid for averaging success probabilities over 1/2 < F < 1
P_AVERAGE_GRID = np.linspace(0.505, 0.995, 101)
MAX_ROUNDS = 64


def max_fidelity_formula(fidelity: float) -> float:
    """Closed-form three-pair output fidelity at ``J t = 2 pi (2n + 1)``."""
    if not 0.0 <= fidelity <= 1.0:
        raise ContractViolation(f"fidelity must lie in [0, 1], got {fidelity}")
    f = fidelity
    return (16.0 - 53.0 * f + 118.0 * f * f) / (59.0 - 106.0 * f + 128.0 * f * f)


@dataclass(frozen=True)
class FidelityCurve:
    t_grid: np.ndarray
    fidelity: np.ndarray
    probability: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "fidelity", "probability"])
        for row in zip(self.t_grid, self.fidelity, self.probability):
            writer.writerow([f"{x:.12g}" for x in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "t": self.t_grid.tolist(),
            "fidelity": self.fidelity.tolist(),
            "probability": self.probability.tolist(),
        }


def fidelity_curve(
    fidelity: float,
    t_grid: Sequence[float],
    site_set: str = "3456",
    coupling: CouplingSpec | None = None,
) -> FidelityCurve:
    """Conditional fidelity and acceptance probability of the three-pair run versus time."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0):
        raise ContractViolation("t_grid must be strictly ascending")
    outs = [three_pair_protocol(fidelity, t, site_set, coupling) for t in t_grid]
    return FidelityCurve(
        t_grid,
        np.array([o.fidelity for o in outs]),
        np.array([o.success_probability for o in outs]),
    )


def _bisect(g, inside: float, outside: float, tol: float) -> float:
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if g(mid) >= 0.0:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


def fwhm_window(fidelity: float, step: float = 0.01, tol: float = 1e-6, max_span: float = math.pi) -> float:
    """Width in ``J t`` of the window around ``2 pi`` with at least half the peak gain.

    The edges are located on a grid of spacing ``step`` walking outward from
    ``2 pi`` and refined by bisection to ``tol``.
    """
    if not 0.5 < fidelity < 1.0:
        raise DegenerateInputError(f"no fidelity gain to measure at F={fidelity}")
    threshold = fidelity + 0.5 * (max_fidelity_formula(fidelity) - fidelity)

    def g(t: float) -> float:
        return three_pair_protocol(fidelity, t).fidelity - threshold

    centre = TWO_PI
    if g(centre) < 0.0:
        raise DegenerateInputError(f"no gain at J t = 2 pi for F={fidelity}")
    edges = []
    for sign in (-1.0, 1.0):
        inside = centre
        while True:
            probe = inside + sign * step
            if abs(probe - centre) > max_span:
                raise DegenerateInputError("gain window does not close within the search span")
            if g(probe) < 0.0:
                break
            inside = probe
        edges.append(_bisect(g, inside, probe, tol))
    return edges[1] - edges[0]


def mutual_information(joint: np.ndarray) -> float:
    """Classical mutual information (bits) of a 2-D joint distribution."""
    joint = np.asarray(joint, dtype=float)
    joint = joint / joint.sum()
    hx = entropy(joint.sum(axis=1), base=2)
    hy = entropy(joint.sum(axis=0), base=2)
    hxy = entropy(joint.ravel(), base=2)
    return max(float(hx + hy - hxy), 0.0)


def label_mutual_information(
    unitary: np.ndarray,
    n_pairs: int,
    unknown_pair: int,
    reference: BellLabel = BellLabel.PHI_PLUS,
) -> float:
    """Information the other pairs' Bell labels carry about an unknown pair's label.

    The unknown pair starts in a uniformly random Bell state and every other
    pair in ``reference``. After ``unitary`` the state is dephased in the
    Bell-product basis; the result is the mutual information between the
    unknown pair's initial label and the joint final labels of the others.
    """
    layout = ChainLayout(n_pairs)
    layout.pair(unknown_pair)
    joint = np.zeros((4, 4 ** (n_pairs - 1)))
    for label in BellLabel:
        kets = [BELL_VECTORS[reference]] * n_pairs
        kets[unknown_pair - 1] = BELL_VECTORS[label]
        psi = functools.reduce(np.kron, kets)
        weights = bell_dephase(QuantumState.pure(unitary @ psi)).reshape([4] * n_pairs)
        others = np.moveaxis(weights, unknown_pair - 1, 0).sum(axis=0)
        joint[int(label)] = others.ravel() / 4.0
    return mutual_information(joint)


def bell_mutual_information(
    layout: ChainLayout, unknown_pair: int, t: float, coupling: CouplingSpec | None = None
) -> float:
    """Bell-label information gained by the other pairs after free evolution for ``t``."""
    coupling = CouplingSpec.isotropic(1.0) if coupling is None else coupling
    u = bilateral_propagator(layout.n_pairs, coupling, float(t))
    return label_mutual_information(u, layout.n_pairs, unknown_pair)


def two_pair_mutual_information(unknown_pair: int, t: float, coupling: CouplingSpec | None = None) -> float:
    return bell_mutual_information(ChainLayout(2), unknown_pair, t, coupling)


def cnot_mutual_information(gate: np.ndarray | None = None) -> float:
    """Same measure for a bilateral CNOT (or ``gate``) with pair 1 unknown."""
    return label_mutual_information(bilateral_cnot() if gate is None else gate, 2, 1)


@functools.lru_cache(maxsize=None)
def _averaged_probabilities() -> tuple[float, float]:
    p_sc = np.mean([three_pair_protocol(f, TWO_PI).success_probability for f in P_AVERAGE_GRID])
    p_b = np.mean([bbpssw_reference(f).success_probability for f in P_AVERAGE_GRID])
    return float(p_sc), float(p_b)


def error_contraction(protocol: str, eps: float = 1e-4) -> float:
    """Slope of ``1 - F'`` against ``1 - F`` at ``F -> 1``, from simulated rounds.

    Richardson-extrapolated from steps ``eps`` and ``2 eps``.
    """
    def ratio(e: float) -> float:
        if protocol == "three_pair":
            out = three_pair_protocol(1.0 - e, TWO_PI).fidelity
        elif protocol == "bbpssw":
            out = bbpssw_reference(1.0 - e).fidelity
        else:
            raise ContractViolation(f"unknown protocol {protocol!r}")
        return (1.0 - out) / e

    return 2.0 * ratio(eps) - ratio(2.0 * eps)


def _rounds_to_reach(step, f_i: float, f_f: float, tol: float) -> tuple[int, list[tuple[float, float]]]:
    f = f_i
    path = []
    for n in range(MAX_ROUNDS + 1):
        if f >= f_f - tol:
            return n, path
        f_next, p = step(f)
        path.append((f, p))
        f = f_next
    raise DivergenceError(f"F_f={f_f} not reached from F_i={f_i} within {MAX_ROUNDS} rounds")


@dataclass(frozen=True)
class ResourceEstimate:
    r_sc: float
    r_b: float
    p_sc_avg: float
    p_b: float
    l_sc: float
    l_b: float
    ratio: float
    round_coefficient: float
    p_mode: str
    rounds_mode: str
    sc_fidelities: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def resource_estimate(
    f_i: float,
    f_f: float,
    p_mode: str = "averaged",
    rounds_mode: str = "asymptotic",
    tol: float = 5e-4,
) -> ResourceEstimate:
    """Initial pairs consumed by the spin-chain protocol and by BBPSSW.

    ``l_sc = (3 / p_sc) ** r_sc`` and ``l_b = (2 / p_b) ** r_b``.

    Parameters
    ----------
    f_i, f_f : float
        Initial and target fidelity, ``1/2 < f_i < f_f < 1``.
    p_mode : {"averaged", "trajectory"}
        ``averaged`` uses the mean simulated success probability over
        ``P_AVERAGE_GRID``; ``trajectory`` the geometric mean along each
        protocol's own round-by-round path.
    rounds_mode : {"asymptotic", "integer"}
        ``asymptotic`` sets ``r_b = r_sc * log(c_sc) / log(c_b)`` with the
        error-contraction slopes ``c`` near ``F = 1``; ``integer`` counts
        whole BBPSSW rounds.
    tol : float
        Slack when comparing a fidelity against ``f_f``: the target is taken
        as quoted to three decimals.
    """
    if not 0.5 < f_i < f_f < 1.0:
        raise ContractViolation(f"need 1/2 < F_i < F_f < 1, got {f_i}, {f_f}")
    if p_mode not in ("averaged", "trajectory"):
        raise ContractViolation(f"unknown p_mode {p_mode!r}")
    if rounds_mode not in ("asymptotic", "integer"):
        raise ContractViolation(f"unknown rounds_mode {rounds_mode!r}")

    def sc_formula_step(f):
        return max_fidelity_formula(f), three_pair_protocol(f, TWO_PI).success_probability

    def b_step(f):
        out = bbpssw_reference(f)
        return out.fidelity, out.success_probability

    r_sc, sc_path = _rounds_to_reach(sc_formula_step, f_i, f_f, tol)
    coefficient = math.log(error_contraction("three_pair")) / math.log(error_contraction("bbpssw"))
    r_b_int, b_path = _rounds_to_reach(b_step, f_i, f_f, tol)
    r_b = coefficient * r_sc if rounds_mode == "asymptotic" else float(r_b_int)

    if p_mode == "averaged":
        p_sc, p_b = _averaged_probabilities()
    else:
        p_sc = float(np.exp(np.mean([math.log(p) for _, p in sc_path])))
        p_b = float(np.exp(np.mean([math.log(p) for _, p in b_path])))

    l_sc = (3.0 / p_sc) ** r_sc
    l_b = (2.0 / p_b) ** r_b
    fidelities = [f for f, _ in sc_path]
    fidelities.append(max_fidelity_formula(fidelities[-1]) if fidelities else f_i)
    return ResourceEstimate(
        r_sc=float(r_sc),
        r_b=float(r_b),
        p_sc_avg=p_sc,
        p_b=p_b,
        l_sc=l_sc,
        l_b=l_b,
        ratio=l_sc / l_b,
        round_coefficient=coefficient,
        p_mode=p_mode,
        rounds_mode=rounds_mode,
        sc_fidelities=fidelities,
    )


def success_probability_ratio(fidelity: float) -> float:
    """Three-pair acceptance probability at ``J t = 2 pi`` over the BBPSSW one."""
    if not 0.5 < fidelity < 1.0:
        raise ContractViolation(f"need 1/2 < F < 1, got {fidelity}")
    return three_pair_protocol(fidelity, TWO_PI).success_probability / bbpssw_reference(fidelity).success_probability


def averaged_success_probability_ratio(lo: float = 0.55, hi: float = 0.95, points: int = 41) -> float:
    return float(np.mean([success_probability_ratio(f) for f in np.linspace(lo, hi, points)]))


def time_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive grid ``lo, lo + step, ...`` up to ``hi``."""
    if step <= 0 or hi < lo:
        raise ContractViolation(f"empty time window [{lo}, {hi}] with step {step}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def dm_anisotropy_run(
    fidelity: float,
    j: float,
    d: Sequence[float],
    t_window: tuple[float, float],
    t_step: float,
    site_set: str = "3456",
) -> tuple[float, float]:
    """Best conditional fidelity over a time window under XY exchange plus DM."""
    grid = time_grid(t_window[0], t_window[1], t_step)
    curve = fidelity_curve(fidelity, grid, site_set, CouplingSpec.xy_dm(j, d))
    best = int(np.argmax(curve.fidelity))
    return float(grid[best]), float(curve.fidelity[best])
