"""Stand-alone DIMACS solver with SAT-competition output.

    python -m rubiksat.sat problem.cnf [--timeout SECS]

Exit status follows the competition convention: 10 SAT, 20 UNSAT, 0 unknown.
"""
import argparse
import sys

from ..cnf import DimacsError, from_dimacs
from .backend import BackendConfig, solve_builtin


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="rubiksat-cdcl", description=__doc__.splitlines()[0])
    ap.add_argument("cnf")
    ap.add_argument("--timeout", type=float, default=None)
    args = ap.parse_args(argv)
    try:
        with open(args.cnf) as fh:
            formula = from_dimacs(fh.read())
    except (OSError, DimacsError) as exc:
        print(f"c error: {exc}", file=sys.stderr)
        return 1
    res = solve_builtin(formula, config=BackendConfig(timeout=args.timeout))
    print(f"c conflicts {res.stats.get('conflicts', 0)}")
    if res.sat:
        print("s SATISFIABLE")
        lits = [res.literal(v) for v in range(1, formula.n_vars + 1)]
        for i in range(0, len(lits), 20):
            print("v " + " ".join(map(str, lits[i:i + 20])))
        print("v 0")
        return 10
    if res.unsat:
        print("s UNSATISFIABLE")
        return 20
    print("s UNKNOWN")
    return 0


if __name__ == "__main__":
    sys.exit(main())
