"""Command-line interface.

Exit codes: 0 ok, 2 bad input, 3 matrix not unitary, 4 not enough ancilla
directions, 5 verification failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from . import __version__
from .bounds import isoholonomic_bound, gate_eigensystem, projective_isoholonomic_bound
from .errors import HolonomyError, InsufficientComplement, NotClosed, NotUnitary
from .evolution import CLOSED_FORM_TOLERANCES, NUMERIC_TOLERANCES, simulate_plan, verify_tightness
from .files import (
    FileFormatError,
    atomic_write,
    bloch_csv,
    dumps,
    plan_to_json,
    read_matrix,
    read_plan,
    report_to_json,
    validate,
)
from .geometry import check_loop, random_closed_loop
from .synthesis import bloch_trajectory, plan_gate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_UNITARY = 3
EXIT_COMPLEMENT = 4
EXIT_VERIFY = 5

SEED_ENV = "HOLONOMY_SEED"

log = logging.getLogger("isoholonomic")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _read_gate(path):
    try:
        return read_matrix(path)
    except FileFormatError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc


def cmd_bound(args) -> int:
    G = _read_gate(args.input)
    spectrum, _ = gate_eigensystem(G)
    if args.projective:
        value, shift = projective_isoholonomic_bound(spectrum)
    else:
        value, shift = isoholonomic_bound(spectrum), None
    print(f"{value:.12g}")
    doc = {
        "bound": value,
        "projective": bool(args.projective),
        "phases": list(spectrum.phases),
    }
    if shift is not None:
        doc["shift_index"] = shift
    print(json.dumps(doc))
    return EXIT_OK


def cmd_synthesize(args) -> int:
    G = _read_gate(args.input)
    plan = plan_gate(G, tau=args.tau, ambient_dim=args.ambient_dim, laps=args.laps)
    _emit(dumps(plan_to_json(plan)), args.out)
    return EXIT_OK


def _load_plan(path):
    try:
        return read_plan(path)
    except FileFormatError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc


def cmd_verify(args) -> int:
    plan = _load_plan(args.plan)
    mode = {"closed": "closed_form", "numeric": "numeric"}[args.mode]
    start = time.perf_counter()
    traj = simulate_plan(plan, args.steps, mode)
    report = verify_tightness(traj, plan.gate)
    tol = CLOSED_FORM_TOLERANCES if mode == "closed_form" else NUMERIC_TOLERANCES
    failures = report.failures(tol)
    doc = report_to_json(
        report,
        steps=args.steps,
        mode=mode,
        failures=failures,
        wall_clock=time.perf_counter() - start,
    )
    if args.out:
        atomic_write(args.out, dumps(doc))
    print(f"bound            {report.bound:.12g}")
    print(f"length           {report.realized_length:.12g}")
    print(f"gap              {report.length_gap:.3e}")
    print(f"holonomy error   {report.holonomy_error:.3e}")
    print(f"PT residual      {report.max_pt_residual:.3e}")
    print(f"QSL slack        {report.qsl_slack:.3e}")
    if failures:
        print("FAILED: " + ", ".join(failures), file=sys.stderr)
        return EXIT_VERIFY
    print("tight")
    return EXIT_OK


def _resolve_seed(flag):
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"{SEED_ENV}={env!r} is not an integer", EXIT_INPUT) from None
    return 0


def cmd_falsify(args) -> int:
    if not 1 <= args.rank < args.dim:
        raise CliError(f"need 1 <= rank < dim (got rank={args.rank}, dim={args.dim})", EXIT_INPUT)
    if args.loops < 1 or args.steps < 2 or args.generators < 1:
        raise CliError("loops >= 1, steps >= 2 and generators >= 1 required", EXIT_INPUT)
    seed = _resolve_seed(args.seed)
    rows = []
    for i in range(args.loops):
        loop_seed = seed + i
        curve = random_closed_loop(args.dim, args.rank, args.generators, loop_seed, args.steps)
        chk = check_loop(curve)
        rows.append(
            {
                "seed": loop_seed,
                "length": chk.length,
                "bound": chk.bound,
                "margin": chk.margin,
                "mesh_error": chk.mesh_error,
                "tolerance": chk.tolerance,
                "violated": chk.violated,
            }
        )
    violations = int(sum(r["violated"] for r in rows))
    min_margin = float(min(r["margin"] for r in rows))
    doc = {
        "schema": "isoholonomic/falsify",
        "schema_version": 1,
        "tool_version": __version__,
        "dim": args.dim,
        "rank": args.rank,
        "generators": args.generators,
        "steps": args.steps,
        "seed": seed,
        "violations": violations,
        "min_margin": min_margin,
        "loops": rows,
    }
    validate(doc, "falsify")
    if args.out:
        atomic_write(args.out, dumps(doc))
    print(f"loops {args.loops}  violations {violations}  min margin {min_margin:.6g}")
    return EXIT_VERIFY if violations else EXIT_OK


def cmd_bloch(args) -> int:
    plan = _load_plan(args.plan)
    if not 0 <= args.channel < len(plan.channels):
        raise CliError(f"plan has {len(plan.channels)} channel(s); no index {args.channel}", EXIT_INPUT)
    t, r, omega = bloch_trajectory(plan.channels[args.channel], args.steps)
    _emit(bloch_csv(t, r, omega), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isoholonomic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="isoholonomic bound of a gate")
    p.add_argument("input", help="MatrixFile JSON")
    p.add_argument("--projective", action="store_true", help="minimise over global phases")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("synthesize", help="tight plan for a gate")
    p.add_argument("input", help="MatrixFile JSON")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--ambient-dim", type=int, default=None, help="default: twice the gate dimension")
    p.add_argument("--laps", type=int, default=1, help="laps per channel; >1 builds a non-tight reference plan")
    p.add_argument("--out")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="simulate a plan and check tightness")
    p.add_argument("plan")
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--mode", choices=["closed", "numeric"], default="closed")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("falsify", help="test the inequality on random closed loops")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--loops", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None, help=f"overrides ${SEED_ENV}; default 0")
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--generators", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_falsify)

    p = sub.add_parser("bloch", help="Bloch and Rabi vectors of one channel as CSV")
    p.add_argument("plan")
    p.add_argument("--channel", type=int, default=0)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bloch)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NotUnitary as exc:
        print(f"error: not unitary: {exc}", file=sys.stderr)
        return EXIT_NOT_UNITARY
    except NotClosed as exc:
        print(f"error: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except InsufficientComplement as exc:
        print(f"error: insufficient complement: {exc}", file=sys.stderr)
        return EXIT_COMPLEMENT
    except (HolonomyError, FileFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
