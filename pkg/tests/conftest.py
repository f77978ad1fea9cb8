"""Collects the acceptance gate verdicts and prints them after the run.

File-descriptor capture swallows even direct writes to the original stdout,
so the gates record their PASS/FAIL lines here and a terminal-summary hook
emits them where every pytest invocation (captured or not) will show them.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance gates")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)
