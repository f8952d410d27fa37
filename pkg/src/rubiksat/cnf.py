"""CNF formulas with labelled variables, tagged clauses and cardinality encoders.

Literals are DIMACS-style signed integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Tag = tuple  # e.g. ("move-type-EO", step)


class ClauseError(ValueError):
    pass


class DimacsError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass
class Formula:
    clauses: list[tuple[int, ...]] = field(default_factory=list)
    tags: list[Tag | None] = field(default_factory=list)
    labels: list[str] = field(default_factory=lambda: [""])  # index 0 unused
    tagged: dict[int, Tag] = field(default_factory=dict)

    @property
    def n_vars(self) -> int:
        return len(self.labels) - 1

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    def new_var(self, label: str = "") -> int:
        self.labels.append(label)
        return len(self.labels) - 1

    def label(self, var: int) -> str:
        return self.labels[abs(var)]

    def add_clause(self, lits: Iterable[int], tag: Tag | None = None) -> int:
        clause = tuple(int(x) for x in lits)
        if not clause:
            raise ClauseError("empty clause")
        seen = set()
        for x in clause:
            if x == 0 or abs(x) > self.n_vars:
                raise ClauseError(f"literal {x} outside 1..{self.n_vars}")
            if x in seen:
                raise ClauseError(f"duplicate literal {x} in {clause}")
            if -x in seen:
                raise ClauseError(f"complementary literals {x} and {-x} in {clause}")
            seen.add(x)
        self.clauses.append(clause)
        self.tags.append(tag)
        if tag is not None:
            self.tagged[len(self.clauses) - 1] = tag
        return len(self.clauses) - 1

    def copy(self) -> "Formula":
        return Formula(list(self.clauses), list(self.tags), list(self.labels), dict(self.tagged))


def encode_alo(formula: Formula, lits: Sequence[int], tag: Tag | None = None) -> None:
    if not lits:
        raise ClauseError("at-least-one over no literals")
    formula.add_clause(lits, tag)


def encode_amo_pairwise(formula: Formula, lits: Sequence[int]) -> None:
    for i in range(len(lits)):
        for j in range(i + 1, len(lits)):
            formula.add_clause((-lits[i], -lits[j]))


def product_shape(n: int) -> tuple[int, int]:
    p = math.isqrt(n)
    if p * p < n:
        p += 1
    return p, -(-n // p)


def encode_amo_product(formula: Formula, lits: Sequence[int], name: str = "amo") -> None:
    """One-level two-product at-most-one: a p x q grid of row/column selectors."""
    n = len(lits)
    if n < 2:
        raise ClauseError(f"product AMO needs at least 2 literals, got {n}")
    p, q = product_shape(n)
    rows = [formula.new_var(f"{name}.u{i + 1}") for i in range(p)]
    cols = [formula.new_var(f"{name}.v{j + 1}") for j in range(q)]
    for k, x in enumerate(lits):
        i, j = divmod(k, q)
        formula.add_clause((-x, rows[i]))
        formula.add_clause((-x, cols[j]))
    encode_amo_pairwise(formula, rows)
    encode_amo_pairwise(formula, cols)


def encode_amo(formula: Formula, lits: Sequence[int], method: str = "pairwise", name: str = "amo") -> None:
    if method == "pairwise" or len(lits) < 2:
        encode_amo_pairwise(formula, lits)
    elif method == "product":
        encode_amo_product(formula, lits, name)
    else:
        raise ValueError(f"unknown AMO method {method!r}")


def encode_exactly_one(
    formula: Formula,
    lits: Sequence[int],
    method: str = "pairwise",
    tag: Tag | None = None,
    name: str = "amo",
) -> None:
    encode_alo(formula, lits, tag)
    encode_amo(formula, lits, method, name)


def encode_conditional_exactly_one(formula: Formula, guard: int, lits: Sequence[int]) -> None:
    """guard -> exactly-one(lits); the AMO half is unconditional."""
    if not lits:
        raise ClauseError("conditional exactly-one over no literals")
    formula.add_clause((-guard, *lits))
    encode_amo_pairwise(formula, lits)


# --- DIMACS ---------------------------------------------------------------


def to_dimacs(formula: Formula) -> str:
    out = []
    for v in range(1, formula.n_vars + 1):
        if formula.labels[v]:
            out.append(f"c var {v} {formula.labels[v]}")
    for ci, tag in sorted(formula.tagged.items()):
        out.append(f"c tag {ci} " + " ".join(str(t) for t in tag))
    out.append(f"p cnf {formula.n_vars} {formula.n_clauses}")
    for c in formula.clauses:
        out.append(" ".join(map(str, c)) + " 0")
    return "\n".join(out) + "\n"


def _parse_tag(parts: list[str]) -> Tag:
    return tuple(int(p) if p.lstrip("-").isdigit() else p for p in parts)


def from_dimacs(text: str) -> Formula:
    labels: dict[int, str] = {}
    tags: dict[int, Tag] = {}
    header = None
    header_line = 0
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line == "%":
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) >= 3 and parts[1] == "var":
                try:
                    labels[int(parts[2])] = " ".join(parts[3:])
                except ValueError:
                    raise DimacsError(lineno, f"bad variable label line {raw!r}") from None
            elif len(parts) >= 4 and parts[1] == "tag":
                try:
                    tags[int(parts[2])] = _parse_tag(parts[3:])
                except ValueError:
                    raise DimacsError(lineno, f"bad tag line {raw!r}") from None
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise DimacsError(lineno, "duplicate header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(lineno, f"malformed header {raw!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
                header_line = lineno
            except ValueError:
                raise DimacsError(lineno, f"malformed header {raw!r}") from None
            continue
        if header is None:
            raise DimacsError(lineno, "clause before header")
        for tok in line.split():
            try:
                x = int(tok)
            except ValueError:
                raise DimacsError(lineno, f"bad literal {tok!r}") from None
            if x == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                if abs(x) > header[0]:
                    raise DimacsError(lineno, f"literal {x} exceeds declared {header[0]} variables")
                pending.append(x)
    if header is None:
        raise DimacsError(0, "missing 'p cnf' header")
    if pending:
        raise DimacsError(len(text.splitlines()), "last clause not terminated by 0")
    if len(clauses) != header[1]:
        raise DimacsError(header_line, f"header declares {header[1]} clauses, found {len(clauses)}")
    f = Formula()
    for v in range(1, header[0] + 1):
        f.new_var(labels.get(v, ""))
    for ci, c in enumerate(clauses):
        f.clauses.append(c)
        f.tags.append(tags.get(ci))
        if ci in tags:
            f.tagged[ci] = tags[ci]
    return f


def varmap_text(formula: Formula) -> str:
    return "".join(f"{v} {formula.labels[v]}\n" for v in range(1, formula.n_vars + 1))
