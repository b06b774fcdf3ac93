import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import support  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if support.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(support.ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
