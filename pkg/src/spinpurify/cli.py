"""Command-line drivers that regenerate every reported curve and number.

Exit codes: 0 on success, 1 on a computation or I/O error, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import analysis, protocols
from .exceptions import SpinPurifyError
from .hamiltonians import ChainLayout, CouplingSpec, invariant_subspace_check
from .spin_system import bell_weights


def parse_grid(text: str) -> tuple[float, float, float]:
    """Parse ``lo:hi:step``."""
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}") from None
    if not step > 0 or not lo < hi:
        raise argparse.ArgumentTypeError(f"need step > 0 and lo < hi, got {text!r}")
    return lo, hi, step


def parse_vector(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(x) for x in text.split(","))
    except ValueError:
        parts = ()
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected dx,dy,dz, got {text!r}")
    return parts


def _fidelity(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"fidelity must lie in [0, 1], got {value}")
    return value


def _dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _write(args, text: str) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _coupling(args) -> CouplingSpec:
    return CouplingSpec(args.jx, args.jy, args.jz, tuple(args.d))


def cmd_curve(args) -> str:
    grid = analysis.time_grid(*args.t)
    curve = analysis.fidelity_curve(args.F, grid, args.site_set, _coupling(args))
    if args.format == "json":
        return _dump_json({"F": args.F, "site_set": args.site_set, **curve.to_dict()})
    return curve.to_csv()


def cmd_compare(args) -> str:
    lo, hi, step = args.F_grid
    rows = []
    for f in analysis.time_grid(lo, hi, step):
        f = float(min(f, 1.0))
        rows.append((f, analysis.max_fidelity_formula(f), protocols.bbpssw_reference(f, check_regime=False).fidelity, f))
    if args.format == "json":
        keys = ("F", "F_sc", "F_bbpssw", "F_identity")
        return _dump_json({"rows": [dict(zip(keys, r)) for r in rows]})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["F", "F_sc", "F_bbpssw", "F_identity"])
    for row in rows:
        writer.writerow([f"{x:.12g}" for x in row])
    return buf.getvalue()


def cmd_resources(args) -> str:
    est = analysis.resource_estimate(args.Fi, args.Ff, args.p_mode, args.rounds_mode)
    return _dump_json({"inputs": {"Fi": args.Fi, "Ff": args.Ff}, **est.to_dict()})


def cmd_mutualinfo(args) -> str:
    layout = ChainLayout(args.n_pairs)
    per_pair = {str(k): analysis.bell_mutual_information(layout, k, args.t) for k in range(1, args.n_pairs + 1)}
    best = max(per_pair, key=per_pair.get)
    return _dump_json(
        {
            "inputs": {"t": args.t, "n_pairs": args.n_pairs},
            "bits_by_unknown_pair": per_pair,
            "best_unknown_pair": int(best),
            "best_bits": per_pair[best],
            "bilateral_cnot_bits": analysis.cnot_mutual_information(),
        }
    )


def cmd_nogo(args) -> str:
    rng = np.random.default_rng(args.seed)
    max_dev = max_gain = max_bell_excess = max_leak = 0.0
    samples = []
    for _ in range(args.samples):
        jx, jy, jz = rng.uniform(-2.0, 2.0, size=3)
        t = float(rng.uniform(0.0, 20.0))
        coupling = CouplingSpec(jx, jy, jz)
        out = protocols.two_pair_protocol(args.F, coupling, t)
        dev = out.fidelity - args.F
        max_dev = max(max_dev, abs(dev))
        max_gain = max(max_gain, dev)
        max_bell_excess = max(max_bell_excess, float(bell_weights(out.post_state).max()) - args.F)
        max_leak = max(max_leak, invariant_subspace_check(coupling).max_leakage)
        samples.append({"jx": float(jx), "jy": float(jy), "jz": float(jz), "t": t, "F_out": out.fidelity})
    return _dump_json(
        {
            "inputs": {"F": args.F, "samples": args.samples, "seed": args.seed},
            "max_abs_deviation": max_dev,
            "max_fidelity_gain": max_gain,
            "max_bell_weight_excess": max_bell_excess,
            "max_subspace_leakage": max_leak,
            "samples": samples,
        }
    )


def cmd_dm(args) -> str:
    lo, hi, step = args.t
    t_best, f_best = analysis.dm_anisotropy_run(args.F, args.J, args.d, (lo, hi), step, args.site_set)
    return _dump_json(
        {
            "inputs": {"F": args.F, "J": args.J, "d": list(args.d), "t": [lo, hi, step], "site_set": args.site_set},
            "t_best": t_best,
            "F_best": f_best,
            "gain": f_best - args.F,
        }
    )


def cmd_acceptance(args) -> str:
    from .acceptance import run_all

    results = run_all()
    lines = [r.line() for r in results]
    args._failed = sum(not r.passed for r in results)
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinpurify", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file whose keys supply defaults for the subcommand flags")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("json",)):
        p.add_argument("--out", default="-", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=formats[0])
        p.set_defaults(allowed_formats=formats)

    def coupling_flags(p, j=1.0):
        p.add_argument("--jx", type=float, default=j)
        p.add_argument("--jy", type=float, default=j)
        p.add_argument("--jz", type=float, default=j)
        p.add_argument("--d", type=parse_vector, default=(0.0, 0.0, 0.0), help="DM vector dx,dy,dz")

    p = sub.add_parser("curve", help="conditional fidelity versus measurement time")
    p.add_argument("--F", type=_fidelity, default=0.75)
    p.add_argument("--t", type=parse_grid, default=(0.0, 40.0, 0.05), help="lo:hi:step in units of 1/J")
    p.add_argument("--site-set", choices=sorted(protocols.SITE_SETS), default="3456")
    p.add_argument("--seed", type=int, default=0)
    coupling_flags(p)
    common(p, ("csv", "json"))
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("compare", help="spin-chain versus BBPSSW output fidelity")
    p.add_argument("--F-grid", type=parse_grid, default=(0.5, 1.0, 0.01))
    common(p, ("csv", "json"))
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("resources", help="initial pairs consumed per protocol")
    p.add_argument("--Fi", type=_fidelity, default=0.75)
    p.add_argument("--Ff", type=_fidelity, default=0.99)
    p.add_argument("--p-mode", choices=("averaged", "trajectory"), default="averaged")
    p.add_argument("--rounds-mode", choices=("asymptotic", "integer"), default="asymptotic")
    common(p)
    p.set_defaults(func=cmd_resources)

    p = sub.add_parser("mutualinfo", help="Bell-label information created by the evolution")
    p.add_argument("--t", type=float, default=2.0 * math.pi)
    p.add_argument("--n-pairs", type=int, choices=(2, 3), default=3)
    common(p)
    p.set_defaults(func=cmd_mutualinfo)

    p = sub.add_parser("nogo", help="random two-pair couplings never raise the fidelity")
    p.add_argument("--F", type=_fidelity, default=0.75)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=7)
    common(p)
    p.set_defaults(func=cmd_nogo)

    p = sub.add_parser("dm", help="XY plus Dzyaloshinskii-Moriya scan")
    p.add_argument("--F", type=_fidelity, default=0.75)
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--d", type=parse_vector, default=(0.1, 0.0, 0.0))
    p.add_argument("--t", type=parse_grid, default=(330.0, 370.0, 0.25))
    p.add_argument("--site-set", choices=sorted(protocols.SITE_SETS), default="3456")
    common(p)
    p.set_defaults(func=cmd_dm)

    p = sub.add_parser("acceptance", help="run the acceptance criteria and print one line each")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_acceptance, allowed_formats=("text",), format="text")
    return parser


def _load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("config file must hold a JSON object")
    converters = {"t": parse_grid, "F_grid": parse_grid, "d": parse_vector}
    out = {}
    for key, value in doc.items():
        key = key.replace("-", "_")
        if key in converters and isinstance(value, str):
            value = converters[key](value)
        out[key] = value
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            defaults = _load_config(known.config)
        except (OSError, ValueError, argparse.ArgumentTypeError) as exc:
            parser.error(f"cannot read config {known.config}: {exc}")
        for action in parser._subparsers._group_actions:
            for subparser in action.choices.values():
                subparser.set_defaults(**defaults)
    args = parser.parse_args(argv)
    if args.format not in args.allowed_formats:
        parser.error(f"{args.command} does not support --format {args.format}")
    try:
        text = args.func(args)
        _write(args, text)
    except (SpinPurifyError, OSError) as exc:
        print(f"spinpurify: error: {exc}", file=sys.stderr)
        return 1
    return 1 if getattr(args, "_failed", 0) else 0


if __name__ == "__main__":
    sys.exit(main())
