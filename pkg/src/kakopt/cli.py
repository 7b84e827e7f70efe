"""Command-line interface.

Subcommands: decompose, canonical, coupling, mintime, roots, simulate,
synth, report.  All emit JSON on stdout except `report`, which writes
figures and CSV tables to a directory.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .io import load_matrix, load_real_matrix, matrix_to_json, vector_from_arg
from .kak import Family, kak_su2n, kak_sun_son, reconstruct
from .linalg import frob

ORBIT_NAMES = {"two-qubit": "TWO_QUBIT_24", "sn": "SN_PERMUTATION", "bn": "BN_SIGNED"}


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_decompose(args) -> int:
    u = load_matrix(args.input)
    fam = Family(args.family)
    factors = kak_sun_son(u) if fam is Family.SUN_SON else kak_su2n(u)
    _emit(
        {
            "k_left": matrix_to_json(factors.k_left),
            "cartan": factors.cartan.values.tolist(),
            "k_right": matrix_to_json(factors.k_right),
            "residual": float(frob(reconstruct(factors) - u)),
        }
    )
    return 0


def cmd_canonical(args) -> int:
    from .twoqubit import canonical_params

    u = load_matrix(args.input)
    triple, k1, k2 = canonical_params(u)
    _emit(
        {
            "triple": triple.tolist(),
            "k1": matrix_to_json(k1),
            "k2": matrix_to_json(k2),
        }
    )
    return 0


def cmd_coupling(args) -> int:
    from .twoqubit import diagonalize_coupling

    j = load_real_matrix(args.J, (3, 3))
    k, triple = diagonalize_coupling(j)
    _emit({"triple": triple.tolist(), "k": matrix_to_json(k)})
    return 0


def cmd_mintime(args) -> int:
    from .weyl import OrbitType, generate_orbit, min_time

    drift = np.asarray(json.loads(args.drift), dtype=float)
    if drift.ndim != 1 or not np.all(np.isfinite(drift)):
        raise ValueError("drift must be a finite vector")
    target = vector_from_arg(args.target, len(drift))
    orbit_type = OrbitType[ORBIT_NAMES[args.orbit]]
    try:
        t, weights = min_time(target, drift, orbit_type)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    points = generate_orbit(drift, orbit_type).points
    _emit(
        {
            "T": t,
            "weights": [
                {"point": p.tolist(), "w": float(w)}
                for p, w in zip(points, weights)
                if w > 0
            ],
        }
    )
    return 0


def cmd_roots(args) -> int:
    from .roots import builtin_ordering, builtin_pair, compute_roots, fundamental_roots

    system = compute_roots(builtin_pair(args.pair), builtin_ordering(args.pair))
    fund = set(fundamental_roots(system))
    _emit(
        [
            {
                "value_fn": r.rep.tolist(),
                "multiplicity": r.multiplicity,
                "fundamental": i in fund,
            }
            for i, r in enumerate(system.positive)
        ]
    )
    return 0


def _parse_family(text: str) -> tuple[Family, int]:
    name, _, size = text.partition(":")
    fam = Family(name)
    n = int(size) if size else (4 if fam is Family.SUN_SON else 2)
    return fam, n


def cmd_simulate(args) -> int:
    from .flow import check_reachable, endpoint_coords, random_schedule, simulate

    fam, n = _parse_family(args.family)
    drift = load_matrix(args.drift)
    expect = n if fam is Family.SUN_SON else 2 * n
    if drift.shape != (expect, expect):
        print(f"error: drift must be {expect}x{expect} for {args.family}", file=sys.stderr)
        return 1
    schedule = random_schedule(fam, n, args.segments, args.seed)
    endpoint = simulate(drift, schedule, fam)
    out = {
        "endpoint": matrix_to_json(endpoint),
        "coords": endpoint_coords(endpoint, fam).tolist(),
        "cert": None,
        "slack": None,
    }
    if args.check:
        cert, slack = check_reachable(endpoint, drift, schedule.total_time, fam)
        out["cert"] = {
            "feasible": cert.feasible,
            "weights": None if cert.weights is None else cert.weights.tolist(),
            "residual": cert.residual,
        }
        out["slack"] = slack
    _emit(out)
    return 0


def cmd_synth(args) -> int:
    from .synth import playback, synthesize

    target = load_matrix(args.target)
    j = load_real_matrix(args.J, (3, 3))
    try:
        prog = synthesize(target, j)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    residual = float(frob(playback(prog, j) - target))
    _emit(
        {
            "k_start": matrix_to_json(prog.k_start),
            "segments": [
                {"w": matrix_to_json(w), "t": t} for w, t in prog.segments
            ],
            "k_end": matrix_to_json(prog.k_end),
            "T": prog.total_time,
            "residual": residual,
        }
    )
    return 0 if residual <= 1e-8 else 1


def cmd_report(args) -> int:
    from .report import write_report

    paths = write_report(args.outdir, seed=args.seed)
    _emit({"written": paths})
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kakopt",
        description="Cartan decompositions, time-optimal reachable sets, "
        "and minimum-time pulse synthesis for coupled spins",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="KAK-factor a special unitary matrix")
    p.add_argument("--family", choices=["sun-son", "su2n"], required=True)
    p.add_argument("--input", required=True, help="matrix JSON file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("canonical", help="canonical two-qubit parameters")
    p.add_argument("--input", required=True, help="matrix JSON file (4x4, SU(4))")
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("coupling", help="diagonalize a 3x3 coupling matrix")
    p.add_argument("--J", required=True, help="3x3 real matrix JSON file")
    p.set_defaults(func=cmd_coupling)

    p = sub.add_parser("mintime", help="minimum-time LP over a Weyl orbit")
    p.add_argument("--drift", required=True, help='e.g. "[1,0,0]"')
    p.add_argument("--target", required=True, help='e.g. "[1,1,1]"')
    p.add_argument("--orbit", choices=list(ORBIT_NAMES), default="two-qubit")
    p.set_defaults(func=cmd_mintime)

    p = sub.add_parser("roots", help="positive restricted roots of a built-in pair")
    p.add_argument(
        "--pair", required=True, help="twospin | epr | sun-son:<n> | su2n:<n>"
    )
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("simulate", help="piecewise-constant random schedule endpoint")
    p.add_argument("--family", required=True, help="sun-son:<n> | su2n:<n>")
    p.add_argument("--drift", required=True, help="drift matrix JSON file")
    p.add_argument("--segments", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", action="store_true", help="attach reachability cert")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synth", help="minimum-time pulse program for a target")
    p.add_argument("--target", required=True, help="matrix JSON file (4x4, SU(4))")
    p.add_argument("--J", required=True, help="3x3 real coupling matrix JSON file")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="write figures and CSV tables")
    p.add_argument("--outdir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
