import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FROZEN = json.loads((Path(__file__).parent / "data" / "frozen.json").read_text())

_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@pytest.fixture
def frozen():
    return FROZEN


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    status = "PASS" if call.excinfo is None else "FAIL"
    detail = ""
    if call.excinfo is not None:
        detail = str(call.excinfo.value).strip().splitlines()[0][:160]
    prev = _ACCEPTANCE.get(number)
    if prev is None or prev[0] == "PASS":
        _ACCEPTANCE[number] = (status, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title, detail = _ACCEPTANCE[number]
        line = f"[{status}] {number:>2}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
