"""Command-line entry point: ``rubiksat <command> ...``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import cube
from .cnf import to_dimacs, varmap_text
from .encoder import DecodeError, EncodingConfig, encode
from .orchestrator import BranchError, DecomposeConfig
from .planner import (
    MAX_SHALLOW_LENGTH,
    Runner,
    Strategy,
    UnverifiedSolutionError,
    bench,
    run_strategy,
    verify_solution,
)
from .sat.backend import BackendConfig, BackendError

EXIT_OK, EXIT_USAGE, EXIT_UNSAT, EXIT_TIMEOUT, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sweep(text: str) -> tuple[int, ...]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            return tuple(int(x) for x in text.split(","))
        return tuple(range(int(lo), int(hi) + 1))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B or a comma list, got {text!r}") from None


def _add_state(p: argparse.ArgumentParser) -> None:
    p.add_argument("state", nargs="?", help="54-character facelet string (letters FLBRUD)")
    p.add_argument("--scramble", help="maneuver applied to the solved cube, e.g. \"R U F'\"")


def _add_encoding(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("encoding")
    g.add_argument("--mode", choices=("exact", "atmost"), default=None)
    g.add_argument("--phase1", type=int, help="phase-one length k")
    g.add_argument("--phase1-sweep", type=_sweep, help="phase-one lengths to try, A..B")
    g.add_argument("--color-bits", type=int, choices=(2, 3), default=3)
    g.add_argument("--no-prune-opposite", action="store_true")
    g.add_argument("--prune-same-face", action="store_true")
    g.add_argument("--no-last-move", action="store_true")
    g.add_argument("--amo", choices=("pairwise", "product"), default=None)


def _add_backend(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--backend", choices=("builtin", "external"), default="builtin")
    g.add_argument("--solver-path")
    g.add_argument("--timeout", type=float, default=60.0, help="seconds per attempt")
    g.add_argument("--workers", type=int, default=1, help="threads for branch decomposition")
    g.add_argument("--alo-depth", type=int, default=0, help="decomposition depth, 0 to solve directly")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--deterministic", action="store_true", help="fixed branch order")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rubiksat", description="SAT-based Rubik's Cube solving")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", help="write the CNF for a state")
    _add_state(p)
    p.add_argument("--states", type=int, help="number of states n (moves = n-1)")
    p.add_argument("--length", type=int, help="number of moves (alternative to --states)")
    _add_encoding(p)
    p.add_argument("--emit-dimacs", metavar="PATH", help="output file, '-' for stdout (default)")
    p.add_argument("--varmap", metavar="PATH")

    p = sub.add_parser("solve", help="find a solving maneuver")
    _add_state(p)
    p.add_argument("--length", type=int, help="maximum length (exact mode) or total budget (atmost)")
    p.add_argument("--states", type=int, help="same as --length n-1")
    _add_encoding(p)
    _add_backend(p)
    p.add_argument("--unicode", action="store_true", help="print primes as ′")

    p = sub.add_parser("verify", help="check that a maneuver solves a state")
    _add_state(p)
    p.add_argument("--maneuver", required=True)

    p = sub.add_parser("scramble", help="seeded canonical scramble")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--length", type=int, default=20)

    p = sub.add_parser("oracle", help="optimal depth by brute force (depth <= 7)")
    _add_state(p)
    p.add_argument("--max-depth", type=int, default=5)

    p = sub.add_parser("bench", help="solve every line of a corpus and report CSV")
    p.add_argument("corpus", help="file with one facelet string or scramble per line")
    p.add_argument("--length", type=int, help="total budget (atmost) or maximum length (exact)")
    _add_encoding(p)
    _add_backend(p)
    p.add_argument("--csv", metavar="PATH", help="output file (default stdout)")
    p.add_argument("--no-times", action="store_true", help="omit timings for byte-stable output")
    return ap


def _state(args) -> cube.CubeState:
    if args.state and args.scramble:
        raise UsageError("give either a facelet string or --scramble, not both")
    if args.scramble is not None:
        return cube.apply_maneuver(cube.SOLVED, cube.parse_maneuver(args.scramble))
    if args.state:
        return cube.parse_facelets(args.state)
    raise UsageError("no input state: pass a facelet string or --scramble")


def _encoding_flags(args) -> dict:
    kw = {}
    if args.no_prune_opposite:
        kw["pruning_opposite"] = False
    if args.prune_same_face:
        kw["pruning_same_face"] = True
    if args.no_last_move:
        kw["last_move_constraint"] = False
    return kw


def _length(args, default: int | None) -> int | None:
    states = getattr(args, "states", None)
    if args.length is not None and states is not None and states != args.length + 1:
        raise UsageError("--length and --states disagree")
    if args.length is not None:
        return args.length
    if states is not None:
        return states - 1
    return default


def _runner(args) -> Runner:
    backend = BackendConfig(args.backend, args.solver_path, timeout=args.timeout,
                            deterministic=args.deterministic)
    depth = args.alo_depth or (1 if args.workers > 1 else 0)
    dec = None
    if depth:
        dec = DecomposeConfig(depth=depth, backend=backend, workers=args.workers,
                              deterministic=args.deterministic, seed=args.seed)
    return Runner(backend, dec)


def _strategy(args) -> tuple[Strategy, dict]:
    kw = _encoding_flags(args)
    two_phase = args.mode == "atmost" or args.phase1 is not None or args.phase1_sweep is not None
    if not two_phase:
        if args.color_bits != 3:
            raise UsageError("--color-bits 2 needs a phase-one length")
        if args.amo:
            kw["amo_method"] = args.amo
        length = _length(args, MAX_SHALLOW_LENGTH)
        return Strategy("optimal-shallow", max_length=length, timeout=args.timeout), kw
    if args.mode == "exact":
        raise UsageError("two-phase solving uses --mode atmost")
    if args.phase1 is not None and args.phase1_sweep is not None:
        raise UsageError("give either --phase1 or --phase1-sweep")
    sweep = (args.phase1,) if args.phase1 is not None else args.phase1_sweep or (9, 10, 11, 12)
    return Strategy("two-phase", total=_length(args, 20), sweep=tuple(sweep), timeout=args.timeout,
                    color_bits=args.color_bits, amo_method=args.amo or "product"), kw


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_encode(args) -> int:
    state = _state(args)
    length = _length(args, None)
    if length is None:
        raise UsageError("encode needs --states or --length")
    cfg = EncodingConfig(
        length + 1,
        mode=args.mode or "exact",
        phase1_len=args.phase1,
        color_bits=args.color_bits,
        amo_method=args.amo or "pairwise",
        **_encoding_flags(args),
    )
    formula, _ = encode(state, cfg)
    _write(args.emit_dimacs, to_dimacs(formula))
    if args.varmap:
        Path(args.varmap).write_text(varmap_text(formula))
    print(f"c {formula.n_vars} variables, {formula.n_clauses} clauses", file=sys.stderr)
    return EXIT_OK


def cmd_solve(args) -> int:
    state = _state(args)
    strategy, kw = _strategy(args)
    report = run_strategy(state, strategy, _runner(args), **kw)
    for a in report.attempts:
        print(f"c attempt states={a.config.n_states} k={a.config.phase1_len} vars={a.n_vars} "
              f"clauses={a.n_clauses} result={a.status} seconds={a.seconds:.3f}", file=sys.stderr)
    if report.solved:
        text = str(report.maneuver)
        if args.unicode:
            text = text.replace("'", "′")
        print(text if text else "(solved)")
        print(f"c length={len(report.maneuver)} phase1={report.phase1_len} phase2={report.phase2_len}",
              file=sys.stderr)
        return EXIT_OK
    print(f"c {report.status.lower()}", file=sys.stderr)
    return EXIT_TIMEOUT if report.status == "TIMEOUT" else EXIT_UNSAT


def cmd_verify(args) -> int:
    state = _state(args)
    rep = verify_solution(state, cube.parse_maneuver(args.maneuver))
    print(f"solves={rep.solves} solved_step={rep.solved_step} h_state_step={rep.h_state_step} "
          f"phase1={rep.phase1_len}")
    return EXIT_OK if rep.solves else EXIT_UNSAT


def cmd_scramble(args) -> int:
    if args.length < 0:
        raise UsageError("--length must be >= 0")
    mv, state = cube.scramble(args.seed, args.length)
    print(mv)
    print(cube.format_facelets(state))
    return EXIT_OK


def cmd_oracle(args) -> int:
    state = _state(args)
    if not 0 <= args.max_depth <= cube.MAX_ORACLE_DEPTH:
        raise UsageError(f"--max-depth must be within 0..{cube.MAX_ORACLE_DEPTH}")
    found = cube.optimal_depth_oracle(state, args.max_depth)
    if found is None:
        print(f"depth > {args.max_depth}")
        return EXIT_UNSAT
    depth, mv = found
    print(f"depth={depth} {mv}".rstrip())
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        lines = Path(args.corpus).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read corpus: {exc}") from None
    strategy, kw = _strategy(args)
    _write(args.csv, bench(lines, strategy, _runner(args), include_time=not args.no_times, **kw))
    return EXIT_OK


COMMANDS = {
    "encode": cmd_encode,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "scramble": cmd_scramble,
    "oracle": cmd_oracle,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        # ValueError covers malformed states, maneuvers and configs
        print(f"rubiksat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnverifiedSolutionError, DecodeError, BackendError, BranchError) as exc:
        print(f"rubiksat: solver failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
