import time
from contextlib import contextmanager

import pytest

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Context manager that times an acceptance criterion and records PASS/FAIL."""
    results = request.config.stash[ACCEPTANCE]

    @contextmanager
    def run(number: int, title: str, budget_s: float):
        start = time.perf_counter()
        ok = False
        try:
            yield
            elapsed = time.perf_counter() - start
            assert elapsed < budget_s, f"runtime {elapsed:.2f}s exceeds budget {budget_s}s"
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} ({elapsed:.2f}s / {budget_s}s)"
            results.append(line)
            print(line)

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, [])
    if results:
        terminalreporter.section("acceptance criteria")
        for line in sorted(results):
            terminalreporter.write_line(line)
