import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import criteria_log  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not criteria_log.results:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(criteria_log.results, key=lambda s: int(s.split()[0])):
        verdict = "PASS" if criteria_log.results[label] else "FAIL"
        terminalreporter.write_line(f"{verdict}  {label}")
