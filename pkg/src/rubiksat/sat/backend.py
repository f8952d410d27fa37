"""Solver front ends: built-in CDCL, external DIMACS solvers, propagation and probing."""
from __future__ import annotations

import os
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..cnf import Formula, to_dimacs
from .solver import CDCLSolver


class BackendError(RuntimeError):
    pass


class SolverSpawnError(BackendError):
    pass


class SolverOutputError(BackendError):
    pass


class InternalVerificationError(BackendError):
    pass


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "builtin"  # builtin | external
    solver_path: str | None = None
    args: tuple[str, ...] = ("{cnf}",)
    timeout: float | None = 60.0
    deterministic: bool = True

    def __post_init__(self):
        if self.kind not in ("builtin", "external"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.kind == "external" and not self.solver_path:
            raise ValueError("external backend needs solver_path")


@dataclass
class SolverResult:
    status: str  # SAT | UNSAT | UNKNOWN
    model: np.ndarray | None = None  # bool per variable, index 0 unused
    reason: str = ""
    seconds: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status == "SAT"

    @property
    def unsat(self) -> bool:
        return self.status == "UNSAT"

    @property
    def unknown(self) -> bool:
        return self.status == "UNKNOWN"

    def literal(self, var: int) -> int:
        return var if self.model[var] else -var


def verify_model(formula: Formula, model) -> bool:
    """True iff every clause has a literal made true by ``model`` (indexed by variable)."""
    if formula.n_clauses == 0:
        return True
    m = np.asarray(model, dtype=bool)
    for c in formula.clauses:
        if not any(m[abs(x)] == (x > 0) for x in c):
            return False
    return True


def _checked(formula: Formula, result: SolverResult, where: str) -> SolverResult:
    if result.sat and not verify_model(formula, result.model):
        raise InternalVerificationError(f"{where} returned a model that falsifies the formula")
    return result


@dataclass
class Propagation:
    values: dict[int, bool]
    conflict: tuple[int, ...] | None = None
    conflict_index: int | None = None

    @property
    def ok(self) -> bool:
        return self.conflict is None


def _as_literals(assignment) -> list[int]:
    if isinstance(assignment, Mapping):
        return [v if val else -v for v, val in assignment.items() if val is not None]
    return [int(x) for x in assignment]


def propagate(formula: Formula, assignment=()) -> Propagation:
    """Unit-propagate ``assignment`` (literals or var->bool) to fixpoint."""
    s = CDCLSolver.from_formula(formula)
    if s.assume(_as_literals(assignment)) and s.propagate():
        return Propagation({abs(x): x > 0 for x in s.assigned_literals()})
    ci = s.conflict_clause
    clause = formula.clauses[ci] if ci is not None and 0 <= ci < formula.n_clauses else ()
    return Propagation({abs(x): x > 0 for x in s.assigned_literals()}, tuple(clause), ci)


@dataclass
class ProbeResult:
    implied: list[int]
    unsat: bool = False


def probe_failed_literals(solver: CDCLSolver, candidates: Iterable[int]) -> ProbeResult:
    """Failed-literal probing on a propagated solver, repeated to fixpoint."""
    cands = list(candidates)
    before = set(solver.assigned_literals())
    changed = True
    while changed:
        changed = False
        for lit in cands:
            if solver.value(lit) is not None:
                continue
            if solver.probe(lit):
                changed = True
                if not (solver.assume([-lit]) and solver.propagate()):
                    return ProbeResult([x for x in solver.assigned_literals() if x not in before], True)
    return ProbeResult([x for x in solver.assigned_literals() if x not in before])


def failed_literal_probe(formula: Formula, candidates: Iterable[int], assignment=()) -> ProbeResult:
    s = CDCLSolver.from_formula(formula)
    if not (s.assume(_as_literals(assignment)) and s.propagate()):
        return ProbeResult([], True)
    return probe_failed_literals(s, candidates)


def run_builtin(solver: CDCLSolver, config: BackendConfig, stop=None) -> SolverResult:
    t0 = time.monotonic()
    status = solver.solve(timeout=config.timeout, stop=stop)
    dt = time.monotonic() - t0
    if status == "SAT":
        return SolverResult("SAT", solver.model(), seconds=dt, stats=solver.stats)
    reason = ""
    if status == "UNKNOWN":
        reason = "stopped" if stop is not None and stop.is_set() else "timeout"
    return SolverResult(status, None, reason, dt, solver.stats)


def solve_builtin(formula: Formula, assumptions: Sequence[int] = (), config: BackendConfig | None = None,
                  stop=None) -> SolverResult:
    config = config or BackendConfig()
    s = CDCLSolver.from_formula(formula)
    s.assume(assumptions)
    return _checked(formula, run_builtin(s, config, stop), "builtin solver")


def parse_competition_output(text: str, n_vars: int) -> tuple[str | None, np.ndarray | None]:
    status = None
    values: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = "SAT"
            elif word == "UNSATISFIABLE":
                status = "UNSAT"
            elif word in ("UNKNOWN", "INDETERMINATE"):
                status = "UNKNOWN"
            else:
                raise SolverOutputError(f"unrecognized status line {line!r}")
        elif line.startswith("v ") or line == "v":
            try:
                values.extend(int(x) for x in line[1:].split())
            except ValueError:
                raise SolverOutputError(f"malformed value line {line!r}") from None
    if status != "SAT":
        return status, None
    model = np.zeros(n_vars + 1, dtype=bool)
    for x in values:
        if x == 0:
            continue
        if abs(x) > n_vars:
            raise SolverOutputError(f"value {x} outside 1..{n_vars}")
        model[abs(x)] = x > 0
    return status, model


def solve_external(formula: Formula, config: BackendConfig, assumptions: Sequence[int] = ()) -> SolverResult:
    """Run a SAT-competition style solver on a temporary DIMACS file."""
    if config.kind != "external":
        raise ValueError("solve_external needs an external BackendConfig")
    f = formula
    if assumptions:
        f = formula.copy()
        for x in assumptions:
            f.clauses.append((int(x),))
            f.tags.append(None)
    fd, path = tempfile.mkstemp(suffix=".cnf", prefix="rubiksat-")
    t0 = time.monotonic()
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(to_dimacs(f))
        argv = [config.solver_path] + [a.replace("{cnf}", path) for a in config.args]
        try:
            proc = subprocess.Popen(argv, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
        except OSError as exc:
            raise SolverSpawnError(f"cannot start {config.solver_path!r}: {exc}") from exc
        try:
            out, err = proc.communicate(timeout=config.timeout)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            return SolverResult("UNKNOWN", reason="timeout", seconds=time.monotonic() - t0)
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass
    dt = time.monotonic() - t0
    status, model = parse_competition_output(out, f.n_vars)
    if status is None:
        if proc.returncode != 0:
            return SolverResult("UNKNOWN", reason=f"exit code {proc.returncode}: {err.strip()[:200]}", seconds=dt)
        raise SolverOutputError("solver exited cleanly without an 's' status line")
    if status == "SAT" and not verify_model(f, model):
        raise SolverOutputError("external solver model falsifies the formula")
    return SolverResult(status, model, "" if status != "UNKNOWN" else "solver reported unknown", dt)


def solve(formula: Formula, config: BackendConfig | None = None, assumptions: Sequence[int] = (),
          stop=None) -> SolverResult:
    config = config or BackendConfig()
    if config.kind == "external":
        return solve_external(formula, config, assumptions)
    return solve_builtin(formula, assumptions, config, stop)
