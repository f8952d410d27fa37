"""Divide-and-conquer solving over move-type clauses.

A tagged at-least-one clause ``x1 | ... | xk`` splits the problem into the
subproblems F(x1) ... F(xk), each with ``xi`` asserted and unit-propagated.
Splitting recurses to a fixed depth and the leaves go to a backend solver.
"""
from __future__ import annotations

import logging
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

from .cnf import Formula
from .encoder import MOVE_TYPE_TAG
from .sat.backend import (
    BackendConfig,
    BackendError,
    SolverResult,
    _checked,
    probe_failed_literals,
    run_builtin,
    solve_external,
)
from .sat.solver import CDCLSolver

log = logging.getLogger(__name__)


class BranchError(RuntimeError):
    def __init__(self, path: tuple[int, ...], cause: Exception):
        super().__init__(f"backend failed on branch {list(path)}: {cause}")
        self.path = path
        self.cause = cause


@dataclass(frozen=True)
class DecomposeConfig:
    width: int = 6
    depth: int = 4
    backend: BackendConfig = field(default_factory=BackendConfig)
    workers: int = 1
    deterministic: bool = True
    seed: int = 0
    lookahead: bool = False

    def __post_init__(self):
        if self.width < 2:
            raise ValueError("branch width must be >= 2")
        if self.depth < 1:
            raise ValueError("recursion depth must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class LeafTrace:
    path: tuple[int, ...]
    status: str
    seconds: float

    def line(self) -> str:
        return f"leaf path={' '.join(map(str, self.path)) or '-'} result={self.status} seconds={self.seconds:.3f}"


def _value_fn(assignment):
    if isinstance(assignment, CDCLSolver):
        return assignment.value
    if isinstance(assignment, Mapping):
        return lambda lit: None if abs(lit) not in assignment else assignment[abs(lit)] == (lit > 0)
    lits = set(assignment)
    return lambda lit: True if lit in lits else False if -lit in lits else None


def tagged_clauses(formula: Formula, tag: str = MOVE_TYPE_TAG) -> list[int]:
    """Indices of clauses carrying ``tag``, ordered by step."""
    found = [(t[1] if len(t) > 1 else 0, ci) for ci, t in formula.tagged.items() if t and t[0] == tag]
    return [ci for _, ci in sorted(found)]


def find_branch_clause(formula: Formula, assignment, width: int = 6, candidates=None) -> int | None:
    """Earliest-step tagged clause that is unsatisfied and has 2..width free literals."""
    value = _value_fn(assignment)
    for ci in candidates if candidates is not None else tagged_clauses(formula):
        vals = [value(x) for x in formula.clauses[ci]]
        if any(v is True for v in vals):
            continue
        free = sum(v is None for v in vals)
        if 2 <= free <= width:
            return ci
    return None


class ALOSolver:
    def __init__(self, formula: Formula, config: DecomposeConfig | None = None):
        self.formula = formula
        self.config = config or DecomposeConfig()
        self.trace: list[LeafTrace] = []
        self.leaves = 0
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._rng = random.Random(self.config.seed)
        self._tagged = tagged_clauses(formula)
        self._probe_vars = sorted({abs(x) for ci in self._tagged for x in formula.clauses[ci]})

    # -- pieces --
    def _branch_literals(self, node: CDCLSolver, ci: int) -> list[int]:
        lits = [x for x in self.formula.clauses[ci] if node.value(x) is None]
        if not self.config.deterministic:
            with self._lock:
                r = self._rng.randrange(len(lits))
            lits = lits[r:] + lits[:r]
        return lits

    def _delegate(self, node: CDCLSolver, path: tuple[int, ...]) -> SolverResult:
        t0 = time.monotonic()
        backend = self.config.backend
        try:
            if backend.kind == "external":
                res = solve_external(self.formula, backend, node.assigned_literals())
            else:
                res = _checked(self.formula, run_builtin(node, backend, self._stop), "builtin solver")
        except BackendError as exc:
            raise BranchError(path, exc) from exc
        tr = LeafTrace(path, res.status, time.monotonic() - t0)
        with self._lock:
            self.leaves += 1
            self.trace.append(tr)
        log.debug(tr.line())
        return res

    def _children(self, node: CDCLSolver, path):
        ci = find_branch_clause(self.formula, node, self.config.width, self._tagged)
        if ci is None:
            return None
        out = []
        for x in self._branch_literals(node, ci):
            child = node.clone()
            if child.assume([x]) and child.propagate():
                out.append((child, path + (x,)))
        return out

    def _rec(self, node: CDCLSolver, level: int, path: tuple[int, ...]) -> SolverResult:
        if self._stop.is_set():
            return SolverResult("UNKNOWN", reason="stopped")
        if self.config.lookahead:
            if probe_failed_literals(node, self._probe_vars).unsat:
                return SolverResult("UNSAT")
        children = self._children(node, path)
        if children is None:
            return self._delegate(node, path)
        unknown = False
        for child, cpath in children:
            if level < self.config.depth:
                res = self._rec(child, level + 1, cpath)
            else:
                res = self._delegate(child, cpath)
            if res.sat:
                return res
            unknown |= res.unknown
        if unknown:
            return SolverResult("UNKNOWN", reason="a branch did not finish")
        return SolverResult("UNSAT")

    def _parallel(self, root: CDCLSolver) -> SolverResult:
        children = self._children(root, ())
        if children is None:
            return self._delegate(root, ())

        def work(item):
            child, cpath = item
            if self.config.depth > 1:
                res = self._rec(child, 2, cpath)
            else:
                res = self._delegate(child, cpath)
            if res.sat:
                self._stop.set()
            return res

        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            results = list(pool.map(work, children))
        sat = [r for r in results if r.sat]
        if sat:
            return sat[0]
        if any(r.unknown for r in results):
            return SolverResult("UNKNOWN", reason="a branch did not finish")
        return SolverResult("UNSAT")

    def solve(self) -> SolverResult:
        t0 = time.monotonic()
        root = CDCLSolver.from_formula(self.formula)
        if not root.propagate():
            res = SolverResult("UNSAT")
        elif self.config.workers > 1:
            res = self._parallel(root)
        else:
            res = self._rec(root, 1, ())
        res.seconds = time.monotonic() - t0
        res.stats = dict(res.stats, leaves=self.leaves)
        return res


def solve(formula: Formula, config: DecomposeConfig | None = None) -> SolverResult:
    return ALOSolver(formula, config).solve()


def sat_solver_rec(formula: Formula, assignment, level: int, config: DecomposeConfig | None = None) -> SolverResult:
    """One recursive call of the decomposition from a given partial assignment."""
    s = ALOSolver(formula, config)
    node = CDCLSolver.from_formula(formula)
    lits = [v if val else -v for v, val in assignment.items()] if isinstance(assignment, Mapping) else list(assignment)
    if not (node.assume(lits) and node.propagate()):
        return SolverResult("UNSAT")
    return s._rec(node, level, tuple(lits))
