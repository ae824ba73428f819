"""Shared pytest hooks: emit the acceptance pass/fail report.

The acceptance tests record one line per criterion; printing them from a
terminal-summary hook keeps them visible even under pytest's output capture.
"""

acceptance_results = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_results:
        terminalreporter.section("acceptance report")
        for line in acceptance_results:
            terminalreporter.write_line(line)
