import pytest
from hypothesis import settings

# numeric property tests can be slow per example; keep the suite
# deterministic so a green run means the same thing every time
settings.register_profile("det", deadline=None, derandomize=True,
                          max_examples=60)
settings.load_profile("det")

_ACCEPT_LINES: list[str] = []


class AcceptanceRecorder:
    """Collects one PASS/FAIL line per acceptance criterion."""

    def check(self, ident: str, passed: bool, detail: str) -> None:
        line = f"{ident} {'PASS' if passed else 'FAIL'}: {detail}"
        _ACCEPT_LINES.append(line)
        print(line)
        assert passed, line


@pytest.fixture(scope="session")
def acceptance() -> AcceptanceRecorder:
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter, exitstatus):
    if _ACCEPT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPT_LINES:
            terminalreporter.write_line(line)
