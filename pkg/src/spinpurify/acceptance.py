"""Exit criteria for the simulator, each returning a pass/fail result with detail.

Shared by ``tests/test_acceptance.py`` and ``spinpurify acceptance``.
"""
from __future__ import annotations

import itertools
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from . import analysis, protocols
from .hamiltonians import ChainLayout, CouplingSpec, invariant_subspace_check
from .protocols import TWO_PI, PureFilterSpec
from .spin_system import bell_weights, is_maximally_entangled

ACCEPTANCE_SEED = 20240607


@dataclass(frozen=True)
class CriterionResult:
    key: str
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key:>3} {self.title}: {self.detail}"


def bbpssw_bell_combinatorics(fidelity: float) -> tuple[float, float]:
    """BBPSSW output fidelity and success probability by Bell-label bookkeeping.

    Labels ``(k, l)`` on both pairs map to ``(k, l+n)``, ``(k+m, n)`` under
    the bilateral CNOT; Sz outcomes on the target pair coincide iff its
    first label bit is 0.
    """
    w = {(0, 0): fidelity, (0, 1): (1 - fidelity) / 3, (1, 0): (1 - fidelity) / 3, (1, 1): (1 - fidelity) / 3}
    p_accept = good = 0.0
    for (k, l), (m, n) in itertools.product(w, repeat=2):
        weight = w[k, l] * w[m, n]
        source = (k, (l + n) % 2)
        target = ((k + m) % 2, n)
        if target[0] == 0:
            p_accept += weight
            if source == (0, 0):
                good += weight
    return good / p_accept, p_accept


def criterion_1() -> CriterionResult:
    grid = np.round(np.arange(0.55, 0.951, 0.05), 10)
    err = max(abs(protocols.three_pair_protocol(f, TWO_PI).fidelity - analysis.max_fidelity_formula(f)) for f in grid)
    return CriterionResult("1", "simulated three-pair fidelity at Jt=2pi matches closed form", err <= 1e-9, f"max error {err:.2e} (tol 1e-9)")


def criterion_2() -> CriterionResult:
    errs = []
    for f in (0.5, 1.0):
        errs.append(abs(analysis.max_fidelity_formula(f) - f))
        errs.append(abs(protocols.three_pair_protocol(f, TWO_PI).fidelity - f))
    err = max(errs)
    return CriterionResult("2", "fixed points F=1/2 and F=1", err <= 1e-12, f"max error {err:.2e} (tol 1e-12)")


def _pure_filter_errors(j: float) -> tuple[bool, float]:
    ok = True
    p_err = 0.0
    for alpha in (0.1, 0.3, 0.6):
        out = protocols.pure_filter(PureFilterSpec.from_alpha(alpha), "optimal", j=j)
        ok &= is_maximally_entangled(out.post_state, tol=1e-9)
        p_err = max(p_err, abs(out.success_probability - 2 * alpha**2))
    return ok and p_err <= 1e-10, p_err


def criterion_3() -> CriterionResult:
    ok, p_err = _pure_filter_errors(1.0)
    return CriterionResult("3", "pure-state filter gives a maximally entangled pair w.p. 2 alpha^2", ok, f"max |p - 2a^2| {p_err:.2e} (tol 1e-10)")


def criterion_4() -> CriterionResult:
    afm = CouplingSpec.isotropic(-1.0)
    grid = np.round(np.arange(0.55, 0.951, 0.05), 10)
    err = max(
        abs(protocols.three_pair_protocol(f, TWO_PI, coupling=afm).fidelity - analysis.max_fidelity_formula(f))
        for f in grid
    )
    ok_pure, p_err = _pure_filter_errors(-1.0)
    ok = ok_pure and err <= 1e-9
    return CriterionResult("4", "antiferromagnetic J=-1 reproduces criteria 1 and 3", ok, f"three-pair error {err:.2e}, filter |p - 2a^2| {p_err:.2e}")


def criterion_5() -> CriterionResult:
    spread = phi_err = 0.0
    for f in (0.55, 0.65, 0.75, 0.85, 0.95):
        w = bell_weights(protocols.three_pair_protocol(f, TWO_PI).post_state)
        spread = max(spread, float(np.ptp(w[1:])))
        phi_err = max(phi_err, abs(w[0] - analysis.max_fidelity_formula(f)))
    ok = spread <= 1e-10 and phi_err <= 1e-10
    return CriterionResult("5", "accepted three-pair state keeps Werner form", ok, f"minor-weight spread {spread:.2e}, Phi+ error {phi_err:.2e} (tol 1e-10)")


def criterion_6a(samples: int = 100, fidelity: float = 0.75) -> CriterionResult:
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    dev = gain = 0.0
    for _ in range(samples):
        coupling = CouplingSpec(*rng.uniform(-2.0, 2.0, size=3))
        t = float(rng.uniform(0.0, 20.0))
        out = protocols.two_pair_protocol(fidelity, coupling, t)
        dev = max(dev, abs(out.fidelity - fidelity))
        gain = max(gain, out.fidelity - fidelity)
    return CriterionResult(
        "6a",
        "two-pair conditional fidelity equals F for random couplings and times",
        dev <= 1e-9,
        f"max |F_out - F| {dev:.3e} (tol 1e-9); max gain {gain:.2e}",
    )


def criterion_6b(samples: int = 20) -> CriterionResult:
    rng = np.random.default_rng(ACCEPTANCE_SEED + 1)
    leak = max(invariant_subspace_check(CouplingSpec(*rng.uniform(-2.0, 2.0, size=3))).max_leakage for _ in range(samples))
    return CriterionResult("6b", "Bell-product subspaces are invariant for random couplings", leak < 1e-12, f"max leakage {leak:.2e} (tol 1e-12)")


def criterion_7() -> CriterionResult:
    sim = protocols.bbpssw_reference(0.75)
    oracle_f, oracle_p = bbpssw_bell_combinatorics(0.75)
    oracle_err = max(abs(sim.fidelity - oracle_f), abs(sim.success_probability - oracle_p))
    ratios = []
    for f in np.linspace(0.6, 0.9, 7):
        ratios.append((analysis.max_fidelity_formula(f) - f) / (protocols.bbpssw_reference(f).fidelity - f))
    ok = oracle_err <= 1e-12 and abs(sim.fidelity - 0.78846) <= 5e-6 and all(1.7 <= r <= 2.3 for r in ratios)
    return CriterionResult(
        "7",
        "BBPSSW reference and gain ratio",
        ok,
        f"F'(0.75)={sim.fidelity:.6f}, oracle error {oracle_err:.1e}, gain ratios {min(ratios):.3f}..{max(ratios):.3f} (band 1.7..2.3)",
    )


def criterion_8() -> CriterionResult:
    f = 0.75
    rejected_gain = protocols.three_pair_rejected_patterns(f, TWO_PI).fidelity - f
    bbpssw_gain = protocols.bbpssw_reference(f).fidelity - f
    ratio = rejected_gain / bbpssw_gain
    ok = rejected_gain > 0 and 0.35 <= ratio <= 0.65
    return CriterionResult("8", "excluded all-equal patterns give about half the BBPSSW gain", ok, f"gain {rejected_gain:.5f}, ratio to BBPSSW {ratio:.3f} (band 0.35..0.65)")


def criterion_9() -> CriterionResult:
    widths = {f: analysis.fwhm_window(f) for f in (0.61, 0.65, 0.75, 0.85, 0.94)}
    ok = all(w < 0.5 for w in widths.values())
    detail = ", ".join(f"F={f}: {w:.4f}" for f, w in widths.items())
    return CriterionResult("9", "half-gain timing window J*dt < 0.5", ok, detail)


def criterion_10() -> CriterionResult:
    cnot_bits = analysis.cnot_mutual_information()
    three = max(analysis.bell_mutual_information(ChainLayout(3), k, TWO_PI) for k in (1, 2, 3))
    two = max(analysis.two_pair_mutual_information(k, TWO_PI) for k in (1, 2))
    ok = abs(cnot_bits - 1.0) <= 1e-10 and abs(three - 1.48) <= 0.01 and abs(two) <= 1e-9
    return CriterionResult("10", "Bell-label mutual information", ok, f"CNOT {cnot_bits:.12f}, three-pair {three:.4f}, two-pair {two:.1e} bits")


def criterion_11() -> CriterionResult:
    est = analysis.resource_estimate(0.75, 0.990)
    expected = (0.8277, 0.8988, 0.9489, 0.9768, 0.9903)
    seq = [h[0] for h in protocols.iterate("three_pair", 0.75, 5)[1:]]
    seq_err = max(abs(a - b) for a, b in zip(seq, expected))
    coef_err = abs(math.log(11 / 27) / math.log(2 / 3) - 2.21)
    sim_coef_err = abs(est.round_coefficient - 2.21)
    ok = est.r_sc == 5 and seq_err <= 5e-4 and abs(est.ratio - 2.07) <= 0.3 and coef_err < 0.01 and sim_coef_err < 0.01
    return CriterionResult(
        "11",
        "resource scaling",
        ok,
        f"r_sc={est.r_sc:g}, sequence error {seq_err:.1e}, l_sc/l_b={est.ratio:.3f}, coefficient {est.round_coefficient:.4f}",
    )


def criterion_12() -> CriterionResult:
    ratio = analysis.success_probability_ratio(0.75)
    return CriterionResult("12", "success-probability ratio to BBPSSW at F=0.75", 0.3 <= ratio <= 0.5, f"{ratio:.4f} (band 0.3..0.5)")


def criterion_13() -> CriterionResult:
    t_best, f_best = analysis.dm_anisotropy_run(0.75, 1.0, (0.1, 0.0, 0.0), (330.0, 370.0), 0.25)
    _, f_xy = analysis.dm_anisotropy_run(0.75, 1.0, (0.0, 0.0, 0.0), (0.0, 400.0), 0.5)
    xy_gain = f_xy - 0.75
    ok = abs(f_best - 0.81) <= 0.01 and 330.0 <= t_best <= 370.0 and xy_gain <= 1e-6
    return CriterionResult("13", "DM anisotropy revives purification, pure XY does not", ok, f"F_best={f_best:.4f} at t={t_best:g}; XY max gain {xy_gain:.1e}")


def criterion_14() -> CriterionResult:
    from .cli import main

    commands = [
        ["curve", "--F", "0.75", "--t", "0:8:0.5"],
        ["compare", "--F-grid", "0.5:1:0.05"],
        ["nogo", "--samples", "5", "--seed", "7"],
        ["mutualinfo"],
        ["resources", "--Fi", "0.75", "--Ff", "0.99"],
        ["dm", "--t", "350:354:0.5"],
    ]
    same = True
    with tempfile.TemporaryDirectory() as tmp:
        for i, cmd in enumerate(commands):
            blobs = []
            for rep in range(2):
                path = os.path.join(tmp, f"{i}_{rep}.out")
                if main(cmd + ["--out", path]) != 0:
                    return CriterionResult("14", "CLI output is byte-identical across runs", False, f"{cmd[0]} exited non-zero")
                with open(path, "rb") as fh:
                    blobs.append(fh.read())
            same &= blobs[0] == blobs[1]
    return CriterionResult("14", "CLI output is byte-identical across runs", same, f"{len(commands)} commands compared")


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6a,
    criterion_6b,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
    criterion_13,
    criterion_14,
)


def run_all() -> list[CriterionResult]:
    return [c() for c in CRITERIA]
