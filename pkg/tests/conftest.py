"""Shared pytest hooks: collect acceptance verdicts and echo them at the end."""

ACCEPTANCE_LINES: list[str] = []


def record_verdict(num: int, name: str, ok: bool, detail: str) -> None:
    """One pass/fail line per acceptance criterion; asserts on failure."""
    line = f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'} [{detail}]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
