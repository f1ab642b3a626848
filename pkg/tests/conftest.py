"""Shared fixtures; acceptance criteria report one line each at the end."""

import pytest

_ACCEPTANCE = {}


@pytest.fixture
def record_acceptance():
    """Call ``record(number, passed, detail)`` from an acceptance test."""

    def record(number, passed, detail=""):
        _ACCEPTANCE[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(
            f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
