import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SUITE_TARGET_SECONDS = 300
_started = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    session.config._suite_elapsed = time.perf_counter() - _started
    if session.config._suite_elapsed > SUITE_TARGET_SECONDS and exitstatus == pytest.ExitCode.OK:
        session.exitstatus = pytest.ExitCode.TESTS_FAILED


def pytest_terminal_summary(terminalreporter, config):
    elapsed = getattr(config, "_suite_elapsed", time.perf_counter() - _started)
    status = "PASS" if elapsed <= SUITE_TARGET_SECONDS else "FAIL"
    terminalreporter.write_line(f"{status} whole suite runtime [{elapsed:.1f}s, target < {SUITE_TARGET_SECONDS}s]")
