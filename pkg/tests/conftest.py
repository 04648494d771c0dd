import time

SUITE_LIMIT_S = 30.0
_start = {}


def pytest_sessionstart(session):
    _start["t"] = time.perf_counter()


def suite_elapsed() -> float:
    return time.perf_counter() - _start.get("t", time.perf_counter())


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if "t" not in _start:
        return
    elapsed = suite_elapsed()
    verdict = "PASS" if elapsed < SUITE_LIMIT_S else "FAIL"
    terminalreporter.write_line(f"A10 suite runtime {verdict}: {elapsed:.2f} s (limit {SUITE_LIMIT_S:.0f} s)")
