import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("ci", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

# criterion number -> (title, passed, seconds); filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    def record(number, title, passed, seconds):
        ACCEPTANCE[number] = (title, passed, seconds)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, passed, secs = ACCEPTANCE[n]
        terminalreporter.write_line("criterion %2d: %s  (%.1fs)  %s"
                                    % (n, "PASS" if passed else "FAIL", secs, title))
