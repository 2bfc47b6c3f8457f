"""One test per acceptance criterion, each at its stated runtime limit.

Every test prints its pass/fail line.  Run directly with
``python tests/test_acceptance.py`` to get just the table.
"""

import time

import pytest

from bvcurrents.acceptance import CRITERIA, run_one

SEED = 42

# seconds
LIMITS = {
    1: 10,
    2: 10,
    3: 30,
    4: 300,
    5: 30,
    6: 10,
    7: 900,
    8: 600,
    9: 120,
    10: 10,
    11: 30,
    12: 60,
}


@pytest.mark.parametrize("number", [n for n, _ in CRITERIA])
def test_criterion(number, capsys):
    start = time.perf_counter()
    result = run_one(number, SEED)
    elapsed = time.perf_counter() - start
    within = elapsed < LIMITS[number]
    with capsys.disabled():
        print(f"\n{result.line()} ({elapsed:.1f}s, limit {LIMITS[number]}s)")
    assert result.passed, result.detail
    assert within, f"took {elapsed:.1f}s, limit {LIMITS[number]}s"


if __name__ == "__main__":
    for n, _ in CRITERIA:
        t = time.perf_counter()
        r = run_one(n, SEED)
        print(f"{r.line()} ({time.perf_counter() - t:.1f}s)")
