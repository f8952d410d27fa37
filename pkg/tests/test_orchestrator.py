import sys
import threading

import numpy as np
import pytest

from rubiksat import cube
from rubiksat.cnf import Formula
from rubiksat.cube import Face
from rubiksat.encoder import MOVE_TYPE_TAG, EncodingConfig, encode
from rubiksat.orchestrator import (
    ALOSolver,
    BranchError,
    DecomposeConfig,
    find_branch_clause,
    sat_solver_rec,
    solve,
    tagged_clauses,
)
from rubiksat.sat import BackendConfig, CDCLSolver, solve_builtin, verify_model


def cube_formula(scramble, length):
    st = cube.apply_maneuver(cube.SOLVED, cube.parse_maneuver(scramble))
    return encode(st, EncodingConfig(length + 1))


def test_branch_clause_on_fresh_encoding():
    f, vm = cube_formula("R U", 3)
    ci = find_branch_clause(f, {})
    assert f.tagged[ci] == (MOVE_TYPE_TAG, 1)
    assert len(f.clauses[ci]) == 6


def test_branch_clause_moves_on_after_assignment():
    f, vm = cube_formula("R U", 3)
    u1 = vm.type_var(1, Face.UP)
    ci = find_branch_clause(f, [u1])
    assert f.tagged[ci] == (MOVE_TYPE_TAG, 2)
    decided = [vm.type_var(t, Face.UP) for t in range(1, 4)]
    assert find_branch_clause(f, decided) is None


def test_branch_clause_respects_width():
    f, vm = cube_formula("R U", 2)
    assert find_branch_clause(f, {}, width=5) is None
    assert find_branch_clause(f, [-vm.type_var(1, Face.UP)], width=5) is not None


def test_tagged_clauses_ordered_by_step():
    f, _ = cube_formula("R", 4)
    assert [f.tagged[ci][1] for ci in tagged_clauses(f)] == [1, 2, 3, 4]


def test_untagged_formula_is_passthrough():
    f = Formula()
    for _ in range(3):
        f.new_var()
    f.add_clause([1, 2])
    f.add_clause([-1, 3])
    s = ALOSolver(f)
    res = s.solve()
    assert res.sat and verify_model(f, res.model)
    assert s.leaves == 1


def test_trivial_unsat_before_branching():
    f = Formula()
    f.new_var()
    f.add_clause([1])
    f.add_clause([-1])
    s = ALOSolver(f)
    assert s.solve().unsat and s.leaves == 0


def test_depth_two_scramble():
    f, vm = cube_formula("R U", 2)
    res = solve(f, DecomposeConfig(depth=2))
    assert res.sat and verify_model(f, res.model)
    assert solve_builtin(f).sat


def test_depth_three_scramble_is_unsat_at_two():
    f, _ = cube_formula("R U F", 2)
    assert solve(f, DecomposeConfig(depth=2)).unsat
    assert solve_builtin(f).unsat


@pytest.mark.parametrize("cfg", [
    DecomposeConfig(depth=1),
    DecomposeConfig(depth=3),
    DecomposeConfig(depth=2, lookahead=True),
    DecomposeConfig(depth=2, workers=3),
    DecomposeConfig(depth=1, workers=2, deterministic=False, seed=5),
])
def test_equivalence_with_direct_solve(shallow_suite, cfg):
    for _, st, d in shallow_suite:
        for length in {max(d - 1, 0), d}:
            f, _ = encode(st, EncodingConfig(length + 1))
            res = solve(f, cfg)
            assert res.status == solve_builtin(f).status
            if res.sat:
                assert verify_model(f, res.model)


def test_leaf_bound():
    f, _ = cube_formula("R U F", 3)
    s = ALOSolver(f, DecomposeConfig(width=6, depth=2))
    s.solve()
    assert s.leaves <= 6 ** 2
    assert all(len(t.path) <= 2 for t in s.trace)
    assert s.trace[0].line().startswith("leaf path=")


def test_serial_deterministic_models_repeat():
    f, _ = cube_formula("R U F", 3)
    a = solve(f, DecomposeConfig(depth=2))
    b = solve(f, DecomposeConfig(depth=2))
    assert np.array_equal(a.model, b.model)


def test_sat_solver_rec_from_assignment():
    f, vm = cube_formula("R U", 2)
    # the solution is U' R', so forcing R first makes it unsolvable
    assert sat_solver_rec(f, [vm.type_var(1, Face.RIGHT)], 1).unsat
    assert sat_solver_rec(f, {vm.type_var(1, Face.UP): True}, 1).sat


def test_external_leaves():
    f, _ = cube_formula("R U", 2)
    backend = BackendConfig("external", sys.executable, args=("-m", "rubiksat.sat", "{cnf}"))
    res = solve(f, DecomposeConfig(depth=1, backend=backend))
    assert res.sat and verify_model(f, res.model)


def test_backend_failure_names_the_branch():
    f, _ = cube_formula("R U", 2)
    backend = BackendConfig("external", "/nonexistent/solver")
    with pytest.raises(BranchError) as ei:
        solve(f, DecomposeConfig(depth=1, backend=backend))
    assert len(ei.value.path) == 1


def test_config_validation():
    for kw in (dict(width=1), dict(depth=0), dict(workers=0)):
        with pytest.raises(ValueError):
            DecomposeConfig(**kw)
