"""Python driver around the CDCL kernels."""
from __future__ import annotations

import time
from typing import Iterable, Sequence

import numpy as np

from .._accel import USE_NUMBA
from . import _cdcl as K

_SEARCH_ARGS = ("lits", "cstart", "csize", "cflag", "cact", "wfirst", "wnext", "assign", "level",
                "reason", "trail", "trail_lim", "polar", "heap", "hpos", "act", "seen", "learnt",
                "st", "fs")

STATUS = {K.SAT: "SAT", K.UNSAT: "UNSAT", K.UNKNOWN: "UNKNOWN"}


def _code(lit: int) -> int:
    return 2 * (abs(lit) - 1) + (lit < 0)


def _dimacs(code: int) -> int:
    v = (code >> 1) + 1
    return -v if code & 1 else v


class CDCLSolver:
    """Conflict-driven clause learning over a fixed clause set.

    Assumptions are asserted as level-0 units, so a solver instance answers a
    single query; use :meth:`clone` to branch from a propagated state.
    """

    def __init__(self, n_vars: int, clauses: Sequence[Sequence[int]]):
        self.n_vars = n_vars
        self.conflict_clause: int | None = None
        n = len(clauses)
        sizes = np.fromiter((len(c) for c in clauses), dtype=np.int64, count=n)
        flat = np.fromiter((_code(x) for c in clauses for x in c), dtype=np.int64, count=int(sizes.sum()))
        cap_lits = int(flat.size) + max(4 * n_vars, 1024)
        cap_cls = n + 1024

        lits = np.zeros(cap_lits, dtype=np.int64)
        cstart = np.zeros(cap_cls, dtype=np.int64)
        csize = np.zeros(cap_cls, dtype=np.int64)
        cflag = np.zeros(cap_cls, dtype=np.int8)
        units: list[tuple[int, int]] = []
        pos = 0
        off = 0
        empty = None
        for ci in range(n):
            k = int(sizes[ci])
            raw = flat[off:off + k]
            off += k
            uniq = list(dict.fromkeys(int(x) for x in raw))
            cstart[ci] = pos
            csize[ci] = len(uniq)
            lits[pos:pos + len(uniq)] = uniq
            pos += len(uniq)
            if not uniq:
                empty = ci
            elif any((x ^ 1) in uniq for x in uniq):
                cflag[ci] = K.FLAG_DELETED
            elif len(uniq) == 1:
                units.append((uniq[0], ci))

        a = {
            "lits": lits, "cstart": cstart, "csize": csize, "cflag": cflag,
            "cact": np.zeros(cap_cls, dtype=np.float64),
            "wfirst": np.full(2 * n_vars, -1, dtype=np.int64),
            "wnext": np.full(2 * cap_cls, -1, dtype=np.int64),
            "assign": np.full(n_vars, -1, dtype=np.int8),
            "level": np.zeros(n_vars, dtype=np.int64),
            "reason": np.full(n_vars, -1, dtype=np.int64),
            "trail": np.zeros(n_vars, dtype=np.int64),
            "trail_lim": np.zeros(n_vars + 1, dtype=np.int64),
            "polar": np.zeros(n_vars, dtype=np.int8),
            "heap": np.arange(n_vars, dtype=np.int64),
            "hpos": np.arange(n_vars, dtype=np.int64),
            "act": np.zeros(n_vars, dtype=np.float64),
            "seen": np.zeros(n_vars, dtype=np.int8),
            "learnt": np.zeros(n_vars + 1, dtype=np.int64),
            "st": np.zeros(K.N_ST, dtype=np.int64),
            "fs": np.array([1.0, 1.0]),
        }
        st = a["st"]
        st[K.N_VARS] = n_vars
        st[K.N_CLAUSES] = n
        st[K.N_ORIG] = n
        st[K.N_LITS] = pos
        st[K.HEAP_SIZE] = n_vars
        st[K.MAX_LEARNTS] = max(n // 3, 2000)
        st[K.NEXT_RESTART] = K.RESTART_BASE
        st[K.CAP_LITS] = cap_lits
        st[K.CAP_CLAUSES] = cap_cls
        K.link_watches(lits, cstart, csize, a["wfirst"], a["wnext"], 0, n)
        self._a = a
        if not USE_NUMBA:
            self._a = {k: v.tolist() for k, v in a.items()}
        self.ok = True
        if empty is not None:
            self.ok = False
            self.conflict_clause = empty
        for code, ci in units:
            if not self._enqueue_root(code, ci):
                break

    @classmethod
    def from_formula(cls, formula) -> "CDCLSolver":
        return cls(formula.n_vars, formula.clauses)

    def clone(self) -> "CDCLSolver":
        other = object.__new__(CDCLSolver)
        other.n_vars = self.n_vars
        other.ok = self.ok
        other.conflict_clause = self.conflict_clause
        if USE_NUMBA:
            other._a = {k: v.copy() for k, v in self._a.items()}
        else:
            other._a = {k: list(v) for k, v in self._a.items()}
        return other

    # -- level-0 assertions --
    def _enqueue_root(self, code: int, ci: int = -1) -> bool:
        a = self._a
        val = K.lit_value(a["assign"], code)
        if val == 1:
            return True
        if val == 0:
            self.ok = False
            if self.conflict_clause is None:
                self.conflict_clause = ci if ci >= 0 else int(a["reason"][code >> 1])
            return False
        K.enqueue(a["assign"], a["level"], a["reason"], a["trail"], a["st"], code, ci)
        return True

    def assume(self, lits: Iterable[int]) -> bool:
        """Assert DIMACS literals at level 0; False if one is already false."""
        if not self.ok:
            return False
        for x in lits:
            if not self._enqueue_root(_code(x)):
                return False
        return True

    def propagate(self) -> bool:
        """Propagate pending level-0 assignments; False on conflict."""
        if not self.ok:
            return False
        a = self._a
        confl = K.propagate(a["lits"], a["cstart"], a["csize"], a["cflag"], a["wfirst"], a["wnext"],
                            a["assign"], a["level"], a["reason"], a["trail"], a["st"])
        if confl != -1:
            self.ok = False
            self.conflict_clause = int(confl)
            return False
        return True

    def probe(self, lit: int) -> bool:
        """True if asserting ``lit`` on top of the current state propagates to a conflict."""
        a = self._a
        code = _code(lit)
        val = K.lit_value(a["assign"], code)
        if val != -1:
            return val == 0
        st = a["st"]
        K.new_level(a["trail_lim"], st)
        K.enqueue(a["assign"], a["level"], a["reason"], a["trail"], st, code, -1)
        confl = K.propagate(a["lits"], a["cstart"], a["csize"], a["cflag"], a["wfirst"], a["wnext"],
                            a["assign"], a["level"], a["reason"], a["trail"], st)
        K.backtrack(a["assign"], a["reason"], a["trail"], a["trail_lim"], a["polar"], a["heap"],
                    a["hpos"], a["act"], st, 0)
        return confl != -1

    # -- queries --
    def value(self, lit: int) -> bool | None:
        val = K.lit_value(self._a["assign"], _code(lit))
        return None if val < 0 else bool(val)

    def assigned_literals(self) -> list[int]:
        st = self._a["st"]
        return [_dimacs(int(c)) for c in self._a["trail"][: st[K.TRAIL_LEN]]]

    def values(self) -> np.ndarray:
        """Per-variable values, index 0 unused: 1 true, 0 false, -1 unassigned."""
        out = np.full(self.n_vars + 1, -1, dtype=np.int8)
        out[1:] = np.asarray(self._a["assign"], dtype=np.int8)
        return out

    def model(self) -> np.ndarray:
        vals = self.values()
        if (vals[1:] < 0).any():
            raise RuntimeError("model requested before all variables are assigned")
        return vals == 1

    @property
    def stats(self) -> dict[str, int]:
        st = self._a["st"]
        return {
            "conflicts": int(st[K.CONFLICTS]),
            "decisions": int(st[K.DECISIONS]),
            "propagations": int(st[K.PROPAGATIONS]),
            "learnts": int(st[K.N_LEARNTS]),
        }

    # -- search --
    def _grow(self) -> None:
        a = self._a
        st = a["st"]
        new_lits = 2 * int(st[K.CAP_LITS]) + self.n_vars
        new_cls = 2 * int(st[K.CAP_CLAUSES])
        extra_l = new_lits - int(st[K.CAP_LITS])
        extra_c = new_cls - int(st[K.CAP_CLAUSES])
        grow = {"lits": (extra_l, 0), "cstart": (extra_c, 0), "csize": (extra_c, 0),
                "cflag": (extra_c, 0), "cact": (extra_c, 0.0), "wnext": (2 * extra_c, -1)}
        for name, (extra, fill) in grow.items():
            arr = a[name]
            if USE_NUMBA:
                a[name] = np.concatenate([arr, np.full(extra, fill, dtype=arr.dtype)])
            else:
                arr.extend([fill] * extra)
        st[K.CAP_LITS] = new_lits
        st[K.CAP_CLAUSES] = new_cls

    def solve(self, timeout: float | None = None, stop=None, chunk: int | None = None) -> str:
        """Returns "SAT", "UNSAT" or "UNKNOWN" (timeout or stop signal)."""
        if not self.ok:
            return "UNSAT"
        if chunk is None:
            chunk = 2000 if USE_NUMBA else 50
        deadline = None if timeout is None else time.monotonic() + timeout
        a = self._a
        while True:
            status = K.search(*(a[k] for k in _SEARCH_ARGS), chunk)
            if status == K.GROW:
                self._grow()
                continue
            if status == K.UNKNOWN:
                if deadline is not None and time.monotonic() >= deadline:
                    return "UNKNOWN"
                if stop is not None and stop.is_set():
                    return "UNKNOWN"
                continue
            if status == K.UNSAT:
                self.ok = False
            return STATUS[status]
