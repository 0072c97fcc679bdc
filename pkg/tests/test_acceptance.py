"""Acceptance suite: one test per criterion, each printing a single verdict line."""
import time

import pytest

from singhyp.acceptance import SUITES

SEED = 1

# (criterion, suite, runtime limit in seconds)
CRITERIA = [
    (1, "w1", 10),
    (2, "transfer", 60),
    (3, "ly", 120),
    (4, "norms", 60),
    (5, "correlation", 600),
    (6, "dimension", 300),
    (7, "loglaw", 900),
    (8, "flow", 900),
    (9, "determinism", None),
]


@pytest.mark.parametrize("criterion,suite,limit", CRITERIA, ids=[f"criterion{c}-{s}" for c, s, _ in CRITERIA])
def test_criterion(criterion, suite, limit, capsys):
    start = time.perf_counter()
    res = SUITES[suite](SEED, 1)
    elapsed = time.perf_counter() - start
    in_time = limit is None or elapsed < limit
    ok = res.passed and in_time
    failed = [c.name for c in res.checks if not c.passed]
    with capsys.disabled():
        budget = "" if limit is None else f" (limit {limit}s)"
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion} {suite}: "
              f"{len(res.checks) - len(failed)}/{len(res.checks)} checks, {elapsed:.1f}s{budget}")
    assert not failed, f"failed checks: {failed}"
    assert in_time, f"runtime {elapsed:.1f}s over {limit}s"
