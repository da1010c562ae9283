"""Shared pytest hooks.

Collects the acceptance-criterion verdict lines emitted by
``tests/test_acceptance.py`` and repeats them in the terminal summary, so
the one-line-per-criterion report is visible in the run log even when all
criteria pass (default capture swallows stdout of passing tests).
"""

VERDICT_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in VERDICT_LINES:
            terminalreporter.write_line(line)
