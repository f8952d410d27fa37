import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from rubiksat import cnf
from rubiksat.cnf import Formula


def fresh(n):
    f = Formula()
    return f, [f.new_var(f"x{i}") for i in range(n)]


def satisfiable_projections(f, lits):
    """Assignments of ``lits`` that extend to a model of ``f`` (exhaustive over auxiliaries)."""
    n = f.n_vars
    orig = set(lits)
    aux = [v for v in range(1, n + 1) if v not in orig]
    out = set()
    for proj in itertools.product((False, True), repeat=len(lits)):
        base = dict(zip(lits, proj))
        for bits in itertools.product((False, True), repeat=len(aux)):
            val = {**base, **dict(zip(aux, bits))}
            if all(any(val[abs(x)] == (x > 0) for x in c) for c in f.clauses):
                out.add(proj)
                break
    return out


def test_new_var_ids_and_labels():
    f = Formula()
    assert f.new_var("a") == 1
    assert f.new_var("b") == 2
    assert f.label(2) == "b" and f.label(-1) == "a"


def test_clause_validation():
    f, (a, b) = fresh(2)
    with pytest.raises(cnf.ClauseError):
        f.add_clause([])
    with pytest.raises(cnf.ClauseError):
        f.add_clause([a, a])
    with pytest.raises(cnf.ClauseError):
        f.add_clause([a, -a])
    with pytest.raises(cnf.ClauseError):
        f.add_clause([3])
    with pytest.raises(cnf.ClauseError):
        f.add_clause([0])


def test_alo():
    f, xs = fresh(20)
    cnf.encode_alo(f, xs[:1])
    assert f.clauses == [(1,)]
    cnf.encode_alo(f, xs)
    assert f.n_clauses == 2 and len(f.clauses[-1]) == 20
    with pytest.raises(cnf.ClauseError):
        cnf.encode_alo(f, [])


@pytest.mark.parametrize("n,expected", [(1, 0), (3, 3), (20, 190)])
def test_pairwise_counts(n, expected):
    f, xs = fresh(n)
    cnf.encode_amo_pairwise(f, xs)
    assert f.n_clauses == expected and f.n_vars == n


def test_product_twenty_literals():
    f, xs = fresh(20)
    cnf.encode_amo_product(f, xs)
    assert f.n_clauses == 56
    assert f.n_vars - 20 == 9


def test_product_four_literals():
    f, xs = fresh(4)
    cnf.encode_amo_product(f, xs)
    assert (f.n_clauses, f.n_vars - 4) == (10, 4)


@pytest.mark.parametrize("n", range(2, 31))
def test_product_count_formula(n):
    f, xs = fresh(n)
    cnf.encode_amo_product(f, xs)
    p, q = math.ceil(math.sqrt(n)), None
    q = math.ceil(n / p)
    assert f.n_clauses == 2 * n + p * (p - 1) // 2 + q * (q - 1) // 2
    assert f.n_vars - n == p + q


def test_product_rejects_tiny():
    f, xs = fresh(1)
    with pytest.raises(cnf.ClauseError):
        cnf.encode_amo_product(f, xs)


@pytest.mark.parametrize("method", ["pairwise", "product"])
@pytest.mark.parametrize("n", range(2, 7))
def test_amo_semantics_truth_table(method, n):
    f, xs = fresh(n)
    cnf.encode_amo(f, xs, method)
    expected = {p for p in itertools.product((False, True), repeat=n) if sum(p) <= 1}
    assert satisfiable_projections(f, xs) == expected


@pytest.mark.parametrize("method", ["pairwise", "product"])
@pytest.mark.parametrize("n", range(2, 7))
def test_exactly_one_semantics(method, n):
    f, xs = fresh(n)
    cnf.encode_exactly_one(f, xs, method)
    expected = {p for p in itertools.product((False, True), repeat=n) if sum(p) == 1}
    assert satisfiable_projections(f, xs) == expected


def test_exactly_one_counts():
    f, xs = fresh(6)
    cnf.encode_exactly_one(f, xs, "pairwise")
    assert f.n_clauses == 16
    f, xs = fresh(20)
    cnf.encode_exactly_one(f, xs, "product")
    assert f.n_clauses == 57


def test_conditional_exactly_one():
    f, xs = fresh(4)
    g, lits = xs[0], xs[1:]
    cnf.encode_conditional_exactly_one(f, g, lits)
    assert f.n_clauses == 1 + 3
    got = satisfiable_projections(f, xs)
    for proj in itertools.product((False, True), repeat=4):
        k = sum(proj[1:])
        assert (proj in got) == (k == 1 if proj[0] else k <= 1)


def test_unknown_amo_method():
    f, xs = fresh(3)
    with pytest.raises(ValueError):
        cnf.encode_amo(f, xs, "ladder")


def test_dimacs_empty():
    assert cnf.to_dimacs(Formula()).strip() == "p cnf 0 0"


def build_sample():
    f, xs = fresh(7)
    cnf.encode_exactly_one(f, xs[:6], "product", tag=("move-type-EO", 1), name="t1")
    f.add_clause([-xs[6], xs[0]])
    return f


def test_dimacs_round_trip_and_determinism():
    a, b = build_sample(), build_sample()
    text = cnf.to_dimacs(a)
    assert text == cnf.to_dimacs(b)
    header = [ln for ln in text.splitlines() if ln.startswith("p ")]
    assert header == [f"p cnf {a.n_vars} {a.n_clauses}"]
    back = cnf.from_dimacs(text)
    assert back.clauses == a.clauses
    assert back.labels == a.labels
    assert back.tagged == a.tagged
    assert cnf.to_dimacs(back) == text


def test_varmap_sidecar():
    f = build_sample()
    lines = cnf.varmap_text(f).splitlines()
    assert len(lines) == f.n_vars
    assert lines[0] == "1 x0"


@pytest.mark.parametrize("text,line", [
    ("p cnf 2 1\n1 x 0\n", 2),
    ("1 2 0\n", 1),
    ("p cnf 1 1\n2 0\n", 2),
    ("p cnf 2 2\n1 2 0\n", 1),
])
def test_dimacs_errors_carry_line(text, line):
    with pytest.raises(cnf.DimacsError) as ei:
        cnf.from_dimacs(text)
    assert ei.value.line == line


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(-8, 8).filter(bool), min_size=1, max_size=4, unique_by=abs),
                max_size=12))
def test_dimacs_round_trip_property(clauses):
    f = Formula()
    for _ in range(8):
        f.new_var()
    for c in clauses:
        f.add_clause(c)
    assert cnf.from_dimacs(cnf.to_dimacs(f)).clauses == f.clauses
