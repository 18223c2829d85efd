"""Collects acceptance-criterion outcomes and prints them after the run."""

import pytest

_RESULTS: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        _RESULTS[number] = (title, bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, passed, detail = _RESULTS[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number:2d} ({title}): {detail}")
