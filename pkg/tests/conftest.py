"""Shared fixtures: the acceptance-criteria report printed after each run."""

import pytest

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance criterion outcome and fail the test if unmet."""

    def record(num: int, title: str, failures: list[str], detail: str = "") -> None:
        ok = not failures
        _ACCEPTANCE[num] = (title, ok, detail if ok else "; ".join(failures))
        assert ok, f"criterion {num} ({title}): " + "; ".join(failures)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[num]
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
