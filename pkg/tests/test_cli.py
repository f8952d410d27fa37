import subprocess
import sys

import pytest

from rubiksat import cube
from rubiksat.cli import main
from rubiksat.cnf import from_dimacs

SOLVED_TEXT = "".join(ch * 9 for ch in "FLBRUD")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_single_move(capsys):
    code, out, _ = run(capsys, "solve", "--scramble", "U", "--length", "1", "--unicode")
    assert code == 0 and out.strip() == "U′"
    code, out, _ = run(capsys, "solve", "--scramble", "U", "--length", "1")
    assert out.strip() == "U'"


def test_solve_facelet_input(capsys):
    text = cube.format_facelets(cube.apply_maneuver(cube.SOLVED, cube.parse_maneuver("R F")))
    code, out, _ = run(capsys, "solve", text, "--length", "3")
    assert code == 0 and out.strip() == "F' R'"


def test_solve_two_phase(capsys):
    code, out, err = run(capsys, "solve", "--scramble", "R U F2", "--mode", "atmost", "--length", "5",
                         "--phase1-sweep", "1..3")
    assert code == 0
    mv = cube.parse_maneuver(out)
    st = cube.apply_maneuver(cube.SOLVED, cube.parse_maneuver("R U F2"))
    assert cube.is_solved(cube.apply_maneuver(st, mv))
    assert "phase1=" in err


def test_solve_with_decomposition(capsys):
    code, out, _ = run(capsys, "solve", "--scramble", "R U", "--length", "3", "--workers", "2",
                       "--deterministic")
    assert code == 0 and out.strip() == "U' R'"


def test_solve_unsat_exit_code(capsys):
    code, _, _ = run(capsys, "solve", "--scramble", "R U F", "--length", "2")
    assert code == 2


def test_solve_timeout_exit_code(capsys):
    code, _, err = run(capsys, "solve", "--scramble", "R U F L B D R2 U'", "--mode", "atmost",
                       "--length", "20", "--phase1", "12", "--timeout", "0.01")
    assert code == 3 and "timeout" in err


@pytest.mark.parametrize("argv", [
    ["solve"],
    ["solve", "--scramble", "Q"],
    ["solve", SOLVED_TEXT[:-1]],
    ["solve", "--scramble", "U", "--phase1", "1", "--phase1-sweep", "0..1"],
    ["solve", "--scramble", "U", "--mode", "exact", "--phase1", "1"],
    ["solve", "--scramble", "U", "--length", "20"],
    ["encode", "--scramble", "U"],
    ["oracle", "--scramble", "U", "--max-depth", "9"],
    ["bench", "/nonexistent/corpus.txt"],
    ["nonsense"],
    ["solve", "--timeout", "abc", "--scramble", "U"],
])
def test_usage_errors_exit_one(capsys, argv):
    with pytest.raises(SystemExit) as ei:
        sys.exit(main(argv))
    assert ei.value.code == 1


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--scramble", "R U", "--maneuver", "U' R'")
    assert code == 0 and "solves=True" in out
    code, out, _ = run(capsys, "verify", "--scramble", "R U", "--maneuver", "U R")
    assert code != 0 and "solves=False" in out


def test_scramble(capsys):
    code, out, _ = run(capsys, "scramble", "--seed", "4", "--length", "7")
    mv_text, facelets = out.splitlines()
    mv, st = cube.scramble(4, 7)
    assert mv_text == str(mv) and facelets == cube.format_facelets(st)


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--scramble", "R U", "--max-depth", "3")
    assert code == 0 and out.strip() == "depth=2 U' R'"
    code, out, _ = run(capsys, "oracle", "--scramble", "R U F", "--max-depth", "2")
    assert code == 2 and "depth > 2" in out


def test_encode_table_one_size(tmp_path, capsys):
    cnf_path, map_path = tmp_path / "f.cnf", tmp_path / "f.map"
    code, _, err = run(capsys, "encode", "--scramble", "R U", "--states", "21", "--phase1", "12",
                       "--mode", "atmost", "--amo", "product",
                       "--emit-dimacs", str(cnf_path), "--varmap", str(map_path))
    assert code == 0
    f = from_dimacs(cnf_path.read_text())
    assert abs(f.n_vars - 3618) / 3618 <= 0.25
    assert abs(f.n_clauses - 66248) / 66248 <= 0.25
    assert len(map_path.read_text().splitlines()) == f.n_vars


def test_encode_to_stdout(capsys):
    code, out, _ = run(capsys, "encode", "--scramble", "U", "--length", "1", "--no-last-move")
    assert code == 0 and "p cnf 312 " in out


def test_bench_csv(tmp_path, capsys):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("R U\nbogus line\n" + SOLVED_TEXT + "\n")
    out_path = tmp_path / "out.csv"
    args = ["bench", str(corpus), "--mode", "atmost", "--length", "4", "--phase1-sweep", "1..2",
            "--no-times", "--csv", str(out_path)]
    assert run(capsys, *args)[0] == 0
    first = out_path.read_text()
    lines = first.splitlines()
    assert lines[0] == "id,phase1_len,phase2_len,total_len,result,seconds"
    assert len(lines) == 4
    assert "parse-error" in lines[2]
    assert run(capsys, *args)[0] == 0
    assert out_path.read_text() == first


def test_solver_failure_exit_code(capsys):
    code, _, err = run(capsys, "solve", "--scramble", "U", "--length", "1", "--backend", "external",
                       "--solver-path", "/nonexistent/solver")
    assert code == 4 and "solver failure" in err


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "rubiksat", "scramble", "--seed", "1", "--length", "3"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and len(out.stdout.splitlines()) == 2
