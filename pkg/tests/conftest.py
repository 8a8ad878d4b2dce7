"""Shared test plumbing.

The acceptance tests register one summary line each; the terminal hook
prints them after the run so the pass/fail verdict per criterion is visible
even with output capture on.
"""

ACCEPTANCE_REPORT: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_REPORT:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_REPORT:
            terminalreporter.write_line(line)
