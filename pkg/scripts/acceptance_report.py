#!/usr/bin/env python3
"""Run the acceptance tests and print one PASS/FAIL line per criterion.

Usage: python3 scripts/acceptance_report.py [extra pytest args]
The random seed is taken from TGA_SEED (default 0).
"""

import os
import re
import sys
from collections import defaultdict

import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
TESTS = os.path.join(HERE, "..", "tests", "test_acceptance.py")


class Collector:
    def __init__(self):
        self.outcomes = defaultdict(list)
        self.seconds = defaultdict(float)

    def pytest_runtest_logreport(self, report):
        m = re.search(r"test_c(\d+)_", report.nodeid)
        if not m:
            return
        k = int(m.group(1))
        self.seconds[k] += report.duration
        if report.when == "call" or report.outcome != "passed":
            self.outcomes[k].append(report.outcome)


def main(argv):
    col = Collector()
    pytest.main([TESTS, "-q", "-p", "no:cacheprovider", *argv], plugins=[col])
    print()
    failed = 0
    for k in range(1, 13):
        res = col.outcomes.get(k, ["missing"])
        ok = all(r == "passed" for r in res)
        failed += not ok
        print(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  ({col.seconds[k]:.1f} s)")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
