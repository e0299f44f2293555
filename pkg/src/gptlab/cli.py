"""Command-line front end.

Exit status: 0 on success or a passing verdict, 1 on a failing verdict or a
construction that cannot be carried out, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io
from .channels import ChannelError, permutation_channel
from .core import find_distinguishing_observable, simplex
from .fidelity import fidelity
from .lp import Tolerances
from .polygon import polygon_theory, run_game
from .programming import (ProgrammingError, build_channel_programmer, build_reversible_programmer,
                          no_programming_audit, verify_program)
from .structure import (Partition, StructureError, enumerate_quasiclassical_decompositions,
                        equivalence_decomposition, quasiclassical_witness, QuasiClassicalStructure)


class UsageError(Exception):
    pass


def fmt(x) -> str:
    return "%.9g" % x


def fmt_vec(v) -> str:
    return "[" + ", ".join(fmt(x) for x in np.ravel(v)) + "]"


def _ints(text, what):
    try:
        return [int(t) for t in text.replace(" ", ",").split(",") if t]
    except ValueError:
        raise UsageError(f"--{what}: expected comma-separated integers, got {text!r}")


def _perms(text, what):
    return [_ints(chunk, what) for chunk in text.split(";") if chunk.strip()]


def _emit(args, rows, header):
    if args.format == "json":
        print(json.dumps([dict(zip(header, r)) for r in rows], indent=1))
    else:
        print("\t".join(header))
        for r in rows:
            print("\t".join(fmt(x) if isinstance(x, float) else str(x) for x in r))


def _tol(args):
    if args.tol is None:
        return None
    return Tolerances(eps_feas=min(1e-9, args.tol), eps_eq=args.tol)


def _theory(args, path):
    return io.theory_from_dict(io.load(path), _tol(args))


def cmd_polygon(args):
    pt = polygon_theory(args.sides)
    print(io.dump(io.theory_to_dict(pt.space), args.out))
    return 0


def cmd_simplex(args):
    print(io.dump(io.theory_to_dict(simplex(args.size)), args.out))
    return 0


def cmd_distinguish(args):
    space = _theory(args, args.theory)
    idx = _ints(args.states, "states")
    if any(not 0 <= i < space.n_pure for i in idx):
        raise UsageError(f"--states: indices must lie in 0..{space.n_pure - 1}")
    obs = find_distinguishing_observable(space, space.extreme_points[idx], _tol(args))
    if not obs:
        print("NOT_DISTINGUISHABLE")
        return 0
    print("DISTINGUISHABLE")
    for i, e in zip(idx, obs.effects):
        print(f"{i}\t{fmt_vec(e)}")
    return 0


def cmd_fidelity(args):
    space = _theory(args, args.theory)
    res = fidelity(space, space.pure(args.a), space.pure(args.b), _tol(args))
    _emit(args, [(args.a, args.b, res.value, str(res.certified_zero).lower())],
          ["a", "b", "fidelity", "certified_zero"])
    return 0


def cmd_decompose(args):
    space = _theory(args, args.theory)
    part = equivalence_decomposition(space, _tol(args))
    _emit(args, [(z, ",".join(map(str, b))) for z, b in enumerate(part.blocks)], ["class", "pure_states"])
    return 0


def cmd_qc_find(args):
    space = _theory(args, args.theory)
    found = enumerate_quasiclassical_decompositions(space, args.max_degree, _tol(args), args.max_classes)
    rows = [(k, s.degree, "|".join(",".join(map(str, b)) for b in s.partition.blocks))
            for k, s in enumerate(found)]
    _emit(args, rows, ["decomposition", "degree", "blocks"])
    return 0


def _dynamics(space, text):
    try:
        return [permutation_channel(space, p) for p in _perms(text, "dynamics")]
    except ChannelError as exc:
        raise UsageError(f"--dynamics: {exc}")


def cmd_build_reversible(args):
    tol = _tol(args)
    system = simplex(args.system_size) if args.system is None else _theory(args, args.system)
    apparatus = _theory(args, args.apparatus)
    part = io.partition_from_dict({"blocks": _perms(args.blocks, "blocks")}, apparatus)
    obs = quasiclassical_witness(part, tol)
    if obs is None:
        print("NO_WITNESS: the blocks are not a quasi-classical decomposition", file=sys.stderr)
        return 1
    dyn = _dynamics(system, args.dynamics)
    try:
        inst = build_reversible_programmer(system, QuasiClassicalStructure(part, obs), dyn, tol=tol)
    except ProgrammingError as exc:
        print(f"FAILED: {exc}", file=sys.stderr)
        return 1
    print(io.dump(io.instance_to_dict(inst), args.out))
    return 0


def cmd_build_channel(args):
    tol = _tol(args)
    system = simplex(args.system_size) if args.system is None else _theory(args, args.system)
    apparatus = _theory(args, args.apparatus)
    idx = _ints(args.programs, "programs")
    dyn = _dynamics(system, args.dynamics)
    try:
        inst = build_channel_programmer(system, apparatus, apparatus.extreme_points[idx], None, dyn, tol=tol)
    except ProgrammingError as exc:
        print(f"FAILED: {exc}", file=sys.stderr)
        return 1
    print(io.dump(io.instance_to_dict(inst), args.out))
    return 0


def cmd_program_verify(args):
    inst = io.instance_from_dict(io.load(args.instance), _tol(args))
    verdicts = [verify_program(inst, k, _tol(args)) for k in range(inst.n_programs)]
    _emit(args, [(k, "PASS" if v else "FAIL") for k, v in enumerate(verdicts)], ["program", "verdict"])
    return 0 if all(verdicts) else 1


def cmd_audit(args):
    inst = io.instance_from_dict(io.load(args.instance), _tol(args))
    try:
        rep = no_programming_audit(inst, _tol(args))
    except ProgrammingError as exc:
        print(f"FAILED: {exc}", file=sys.stderr)
        return 1
    rows = [(i, j, str(d).lower(), str(s).lower(), "FAIL" if d and not s else "PASS") for i, j, d, s in rep.pairs]
    _emit(args, rows, ["program_a", "program_b", "dynamics_differ", "distinguishable", "verdict"])
    return 0 if rep.passed else 1


GAME_HEADER = ["M", "N", "lp_value", "closed_form", "baseline", "achieved", "verdict"]


def _game_row(MN):
    M, N = MN
    return run_game(N, M).row()


def cmd_game(args):
    N = args.system or args.sides
    rep = run_game(N, args.sides, _tol(args))
    _emit(args, [tuple(rep.row()[h] for h in GAME_HEADER)], GAME_HEADER)
    return 0 if rep.passed else 1


def cmd_sweep_game(args):
    if args.sides_from < 3 or args.sides_to < args.sides_from:
        raise UsageError("--sides-from must be at least 3 and not above --sides-to")
    jobs = [(M, M if args.system is None else max(M, args.system))
            for M in range(args.sides_from, args.sides_to + 1)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(_game_row, jobs))
    else:
        rows = [_game_row(j) for j in jobs]
    _emit(args, [tuple(r[h] for h in GAME_HEADER) for r in rows], GAME_HEADER)
    return 0 if all(r["verdict"] == "PASS" for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gptlab", description=__doc__.splitlines()[0])
    p.add_argument("--tol", type=float, default=None, help="override eps_eq")
    p.add_argument("--format", choices=["tsv", "json"], default="tsv")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("polygon", help="emit a regular polygon theory")
    s.add_argument("--sides", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_polygon)

    s = sub.add_parser("simplex", help="emit a classical theory")
    s.add_argument("--size", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simplex)

    s = sub.add_parser("distinguish", help="test perfect distinguishability of pure states")
    s.add_argument("--theory", required=True)
    s.add_argument("--states", required=True)
    s.set_defaults(func=cmd_distinguish)

    s = sub.add_parser("fidelity", help="fidelity of two pure states")
    s.add_argument("--theory", required=True)
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--b", type=int, required=True)
    s.set_defaults(func=cmd_fidelity)

    s = sub.add_parser("decompose", help="equivalence classes of pure states")
    s.add_argument("--theory", required=True)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("qc-find", help="enumerate quasi-classical decompositions")
    s.add_argument("--theory", required=True)
    s.add_argument("--max-degree", type=int, default=2)
    s.add_argument("--max-classes", type=int, default=12)
    s.set_defaults(func=cmd_qc_find)

    for name, func, extra in (("program-build-reversible", cmd_build_reversible, "--blocks"),
                              ("program-build-channel", cmd_build_channel, "--programs")):
        s = sub.add_parser(name)
        g = s.add_mutually_exclusive_group(required=True)
        g.add_argument("--system", help="system theory file")
        g.add_argument("--system-size", type=int, help="classical system with this many pure states")
        s.add_argument("--apparatus", required=True)
        s.add_argument("--dynamics", required=True,
                       help="permutations of system pure states, e.g. '0,1,2;1,2,0'")
        if extra == "--blocks":
            s.add_argument("--blocks", required=True, help="apparatus blocks, e.g. '0,1;2,3'")
        else:
            s.add_argument("--programs", required=True, help="apparatus pure-state indices")
        s.add_argument("--out")
        s.set_defaults(func=func)

    s = sub.add_parser("program-verify", help="check every program of an instance")
    s.add_argument("--instance", required=True)
    s.set_defaults(func=cmd_program_verify)

    s = sub.add_parser("audit", help="distinct dynamics need distinguishable programs")
    s.add_argument("--instance", required=True)
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("game", help="polygon programming game")
    s.add_argument("--sides", type=int, required=True)
    s.add_argument("--system", type=int, default=None, help="classical system size (default: sides)")
    s.set_defaults(func=cmd_game)

    s = sub.add_parser("sweep-game", help="game over a range of polygons")
    s.add_argument("--sides-from", type=int, default=3)
    s.add_argument("--sides-to", type=int, default=12)
    s.add_argument("--system", type=int, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep_game)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, io.FormatError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # game sizes, polygon sides and tolerance checks
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
