import os

import pytest
from hypothesis import HealthCheck, settings

from trapkit.model import io

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

NET3 = """\
x1, (!x1 | !x2) & x3
x2, x1 & x3
x3, x1 | x2 | x3
"""

XOR_OR = """\
x1, x1 & !x2 | !x1 & x2
x2, x1 | x2
"""


@pytest.fixture(scope="session")
def net3():
    return io.parse_network(NET3, "formula")


@pytest.fixture(scope="session")
def xor_or():
    return io.parse_network(XOR_OR, "formula")


@pytest.fixture
def net3_file(tmp_path):
    p = tmp_path / "net3.bn"
    p.write_text(NET3)
    return p


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
