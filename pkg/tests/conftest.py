import pytest

from b0units.invariants import Session
from b0units.pcgroup import builtin

_SESSIONS: dict[str, Session] = {}

# criterion number -> (passed, label); filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def shared_session(name: str) -> Session:
    """One cached Session per builtin group for the whole test run."""
    if name not in _SESSIONS:
        _SESSIONS[name] = Session(builtin(name))
    return _SESSIONS[name]


@pytest.fixture(scope="session")
def jm14():
    return shared_session("jm14_f39")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, label = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {label}")
