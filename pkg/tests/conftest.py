import time
from dataclasses import dataclass

import numpy as np
import pytest

# acceptance verdicts by criterion number, filled as the acceptance tests finish
ACCEPTANCE = {}


@dataclass
class Verdict:
    number: int
    title: str
    start: float = 0.0
    passed: bool | None = None
    detail: str = "did not complete"
    seconds: float = 0.0

    def report(self, passed: bool, detail: str) -> bool:
        self.passed = bool(passed)
        self.detail = detail
        self.seconds = time.perf_counter() - self.start
        print(self.line())
        return self.passed

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} criterion {self.number:2d} {self.title}: {self.detail} [{self.seconds:.1f} s]"


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def criterion():
    """Factory for one acceptance verdict; stored with its wall time on teardown."""
    made = []

    def make(number: int, title: str) -> Verdict:
        v = Verdict(number, title, time.perf_counter())
        made.append(v)
        return v

    yield make
    for v in made:
        v.seconds = time.perf_counter() - v.start
        ACCEPTANCE[v.number] = v


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number].line())
    passed = sum(1 for v in ACCEPTANCE.values() if v.passed)
    terminalreporter.write_line(f"{passed}/{len(ACCEPTANCE)} criteria pass")
