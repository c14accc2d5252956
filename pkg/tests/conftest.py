import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(autouse=True, scope="session")
def _isolated_cache(tmp_path_factory):
    """Kernel and quantile caches live in a per-session temp directory."""
    old = os.environ.get("NONSTAT_CACHE_DIR")
    os.environ["NONSTAT_CACHE_DIR"] = str(tmp_path_factory.mktemp("nonstat-cache"))
    yield
    if old is None:
        os.environ.pop("NONSTAT_CACHE_DIR", None)
    else:
        os.environ["NONSTAT_CACHE_DIR"] = old


ACCEPTANCE_LINES: list = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    def _report(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
