"""Solving strategies built on the encoder and the solvers."""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field, replace
from typing import Iterable

from . import cube
from .cube import A10, CubeState, Maneuver
from .encoder import EncodingConfig, decode_solution, encode
from .orchestrator import ALOSolver, DecomposeConfig
from .sat.backend import BackendConfig, SolverResult, solve

MAX_SHALLOW_LENGTH = 13


class UnverifiedSolutionError(RuntimeError):
    pass


@dataclass(frozen=True)
class Strategy:
    kind: str = "two-phase"  # two-phase | optimal-shallow
    max_length: int = MAX_SHALLOW_LENGTH
    total: int = 20
    sweep: tuple[int, ...] = (9, 10, 11, 12)
    timeout: float | None = 60.0
    color_bits: int = 3
    amo_method: str = "product"

    def __post_init__(self):
        if self.kind not in ("two-phase", "optimal-shallow"):
            raise ValueError(f"unknown strategy {self.kind!r}")
        if self.max_length < 0 or self.total <= 0:
            raise ValueError("length budgets must be positive")
        if self.kind == "optimal-shallow" and self.max_length > MAX_SHALLOW_LENGTH:
            raise ValueError(f"optimal-shallow is limited to {MAX_SHALLOW_LENGTH} moves")
        if any(not 0 <= k < self.total for k in self.sweep):
            raise ValueError("phase-one lengths must lie below the total budget")

    def describe(self) -> str:
        if self.kind == "optimal-shallow":
            return f"optimal-shallow(max={self.max_length})"
        return f"two-phase(total={self.total},sweep={','.join(map(str, self.sweep))})"


@dataclass
class Attempt:
    config: EncodingConfig
    status: str
    seconds: float
    n_vars: int = 0
    n_clauses: int = 0
    maneuver: str | None = None


@dataclass
class SolveReport:
    state: str
    strategy: str
    attempts: list[Attempt] = field(default_factory=list)
    maneuver: Maneuver | None = None
    phase1_len: int | None = None
    phase2_len: int | None = None
    verified: bool = False
    status: str = "UNSOLVED"  # SOLVED | UNSOLVED | TIMEOUT

    @property
    def solved(self) -> bool:
        return self.status == "SOLVED"

    @property
    def seconds(self) -> float:
        return sum(a.seconds for a in self.attempts)


@dataclass
class VerifyReport:
    solves: bool
    solved_step: int | None
    h_state_step: int | None
    phase1_len: int | None


def phase_split(state: CubeState, mv: Maneuver) -> int | None:
    """Smallest h such that the state after h moves is an H-state and every later move is in A10."""
    states = [state]
    for m in mv:
        states.append(cube.apply_move(states[-1], m))
    tail_ok = len(mv)
    while tail_ok > 0 and mv[tail_ok - 1] in A10:
        tail_ok -= 1
    for h in range(tail_ok, len(mv) + 1):
        if cube.is_h_state(states[h]):
            return h
    return None


def verify_solution(state: CubeState, mv: Iterable[cube.Move]) -> VerifyReport:
    mv = Maneuver(mv)
    solved_step = h_step = None
    s = state
    for i in range(len(mv) + 1):
        if i:
            s = cube.apply_move(s, mv[i - 1])
        if solved_step is None and cube.is_solved(s):
            solved_step = i
        if h_step is None and cube.is_h_state(s):
            h_step = i
    return VerifyReport(cube.is_solved(s), solved_step, h_step, phase_split(state, mv))


@dataclass(frozen=True)
class Runner:
    """How a single formula is solved: directly by a backend or via decomposition."""

    backend: BackendConfig = field(default_factory=BackendConfig)
    decompose: DecomposeConfig | None = None

    def with_timeout(self, timeout: float | None) -> "Runner":
        backend = replace(self.backend, timeout=timeout)
        dec = replace(self.decompose, backend=backend) if self.decompose else None
        return Runner(backend, dec)

    def __call__(self, formula) -> SolverResult:
        if self.decompose is not None:
            return ALOSolver(formula, self.decompose).solve()
        return solve(formula, self.backend)


def _attempt(state: CubeState, cfg: EncodingConfig, runner: Runner, report: SolveReport) -> Maneuver | None:
    t0 = time.monotonic()
    formula, vm = encode(state, cfg)
    res = runner(formula)
    att = Attempt(cfg, res.status, 0.0, formula.n_vars, formula.n_clauses)
    report.attempts.append(att)
    mv = None
    if res.sat:
        mv, _ = decode_solution(res.model, vm)
        att.maneuver = str(mv)
    att.seconds = time.monotonic() - t0
    return mv


def _finish(report: SolveReport, state: CubeState, mv: Maneuver) -> SolveReport:
    check = verify_solution(state, mv)
    if not check.solves:
        raise UnverifiedSolutionError(f"maneuver {mv} does not solve {cube.format_facelets(state)}")
    report.maneuver = mv
    report.verified = True
    report.status = "SOLVED"
    report.phase1_len = check.phase1_len
    report.phase2_len = len(mv) - check.phase1_len
    return report


def solve_optimal_shallow(state: CubeState, max_length: int, runner: Runner | None = None,
                          timeout: float | None = None, **encoding) -> SolveReport:
    """Iterative deepening over exact-length encodings: the first SAT length is optimal."""
    if not 0 <= max_length <= MAX_SHALLOW_LENGTH:
        raise ValueError(f"max_length must be within 0..{MAX_SHALLOW_LENGTH}")
    runner = runner or Runner()
    if timeout is not None:
        runner = runner.with_timeout(timeout)
    report = SolveReport(cube.format_facelets(state), f"optimal-shallow(max={max_length})")
    for length in range(max_length + 1):
        cfg = EncodingConfig(length + 1, mode="exact", **encoding)
        mv = _attempt(state, cfg, runner, report)
        if mv is not None:
            return _finish(report, state, mv)
        if report.attempts[-1].status == "UNKNOWN":
            report.status = "TIMEOUT"
            return report
    return report


def solve_two_phase(state: CubeState, strategy: Strategy | None = None, runner: Runner | None = None,
                    **encoding) -> SolveReport:
    """Sweep the phase-one length; the first satisfiable encoding wins."""
    strategy = strategy or Strategy()
    runner = (runner or Runner()).with_timeout(strategy.timeout)
    report = SolveReport(cube.format_facelets(state), strategy.describe())
    if cube.is_solved(state):
        return _finish(report, state, Maneuver())
    timed_out = False
    for k in strategy.sweep:
        cfg = EncodingConfig(
            strategy.total + 1,
            mode="atmost",
            phase1_len=k,
            color_bits=strategy.color_bits,
            amo_method=strategy.amo_method,
            **encoding,
        )
        mv = _attempt(state, cfg, runner, report)
        if mv is not None:
            return _finish(report, state, mv)
        timed_out |= report.attempts[-1].status == "UNKNOWN"
    report.status = "TIMEOUT" if timed_out else "UNSOLVED"
    return report


def run_strategy(state: CubeState, strategy: Strategy, runner: Runner | None = None, **encoding) -> SolveReport:
    if strategy.kind == "optimal-shallow":
        return solve_optimal_shallow(state, strategy.max_length, runner, strategy.timeout, **encoding)
    return solve_two_phase(state, strategy, runner, **encoding)


def parse_state_line(line: str) -> CubeState:
    """A corpus line is either a 54-character facelet string or a scramble maneuver."""
    text = line.strip()
    compact = text.replace(" ", "")
    if len(compact) == cube.N_FACELETS and set(compact) <= set(cube.FACE_LETTERS):
        try:
            return cube.parse_facelets(compact)
        except cube.FaceletError:
            pass
    return cube.apply_maneuver(cube.SOLVED, cube.parse_maneuver(text))


BENCH_COLUMNS = ("id", "phase1_len", "phase2_len", "total_len", "result", "seconds")


def bench(lines: Iterable[str], strategy: Strategy, runner: Runner | None = None,
          include_time: bool = True, **encoding) -> str:
    """CSV report, one row per corpus line; blank lines and '#' comments are skipped."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    row_id = 0
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        row_id += 1
        try:
            state = parse_state_line(line)
        except ValueError as exc:
            w.writerow([row_id, "", "", "", f"parse-error: {exc}", ""])
            continue
        report = run_strategy(state, strategy, runner, **encoding)
        seconds = f"{report.seconds:.3f}" if include_time else "-"
        if report.solved:
            w.writerow([row_id, report.phase1_len, report.phase2_len, len(report.maneuver), "solved", seconds])
        else:
            w.writerow([row_id, "", "", "", report.status.lower(), seconds])
    return out.getvalue()
