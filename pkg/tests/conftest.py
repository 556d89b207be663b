import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qxir.demos import deuteron_source  # noqa: E402
from qxir.frontend import KernelSource, compile  # noqa: E402


@pytest.fixture(scope="session")
def deuteron_text() -> str:
    return deuteron_source()


@pytest.fixture(scope="session")
def deuteron_ir(deuteron_text):
    return compile(KernelSource(deuteron_text, "gate-quil"))


FACTOR15_HEAD = """__qpu__ factor15() {
   0 0 20;
   1 1 50;
   1 6 -128;
   2 6 -128;
}
"""


@pytest.fixture
def factor15_text() -> str:
    return FACTOR15_HEAD


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
