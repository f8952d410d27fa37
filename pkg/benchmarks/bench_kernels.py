"""Compare the numba kernels with the pure-Python fallback.

Each backend runs in its own interpreter because the choice is made at import
time from RUBIKSAT_NO_NUMBA.  Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
from rubiksat import cube
from rubiksat._accel import backend_name
from rubiksat.encoder import EncodingConfig, encode
from rubiksat.sat import solve_builtin

repeat = int(sys.argv[1])
import random
from rubiksat.cnf import Formula
_, st = cube.scramble(11, 5)
d = cube.optimal_depth_oracle(st, 5)[0]
sat_f = encode(st, EncodingConfig(d + 1))[0]
unsat_f = encode(st, EncodingConfig(d))[0]
_, deep = cube.scramble(12, 5)
rng = random.Random(5)
rand_f = Formula()
for _ in range(150):
    rand_f.new_var()
for _ in range(630):
    vs = rng.sample(range(1, 151), 3)
    rand_f.add_clause([v if rng.random() < 0.5 else -v for v in vs])

# warm-up so numba compile time is not counted
solve_builtin(sat_f); cube.optimal_depth_oracle(deep, 5)
out = {"backend": backend_name()}
for name, fn in [
    ("cdcl_sat", lambda: solve_builtin(sat_f).status),
    ("cdcl_unsat", lambda: solve_builtin(unsat_f).status),
    ("cdcl_random3", lambda: solve_builtin(rand_f).status),
    ("oracle_depth5", lambda: cube.optimal_depth_oracle(deep, 5)[0]),
]:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter(); res = fn(); times.append(time.perf_counter() - t0)
    out[name] = (min(times), str(res))
print(json.dumps(out))
"""


def run(no_numba: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("RUBIKSAT_NO_NUMBA", None)
    if no_numba:
        env["RUBIKSAT_NO_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", WORKLOAD, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    print(f"{'kernel':<15}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}  result")
    for key in ("cdcl_sat", "cdcl_unsat", "cdcl_random3", "oracle_depth5"):
        (a, ra), (b, rb) = fast[key], slow[key]
        assert ra == rb, f"{key}: backends disagree ({ra} vs {rb})"
        print(f"{key:<15}{a:>11.4f}s{b:>11.4f}s{b / a:>9.1f}x  {ra}")


if __name__ == "__main__":
    main()
