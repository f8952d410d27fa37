import sys
import numpy as np

import pytest

from rubiksat import cube


def brute_force_sat(n_vars, clauses):
    """Truth-table satisfiability; returns a model list (index 0 unused) or None."""
    total = 1 << n_vars
    for lo in range(0, total, 1 << 16):
        idx = np.arange(lo, min(total, lo + (1 << 16)), dtype=np.int64)
        # column v holds the value of variable v (column 0 unused)
        vals = np.zeros((idx.size, n_vars + 1), dtype=bool)
        for v in range(1, n_vars + 1):
            vals[:, v] = (idx >> (v - 1)) & 1
        ok = np.ones(idx.size, dtype=bool)
        for c in clauses:
            sat = np.zeros(idx.size, dtype=bool)
            for x in c:
                sat |= vals[:, abs(x)] if x > 0 else ~vals[:, abs(x)]
            ok &= sat
        hits = np.flatnonzero(ok)
        if hits.size:
            return vals[hits[0]].tolist()
    return None


@pytest.fixture(scope="session")
def shallow_suite():
    """Seeded canonical scrambles with their oracle depth (d <= 4 keeps tests fast)."""
    out = []
    for seed in range(8):
        mv, st = cube.scramble(1000 + seed, 1 + seed % 4)
        d, _ = cube.optimal_depth_oracle(st, 5)
        out.append((mv, st, d))
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
