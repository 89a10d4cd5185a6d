import pytest

from ptsem import fixture
from ptsem.process import ExplicitChoice, build_process

# filled in by test_acceptance, printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def net_a():
    return fixture("NET-A")


@pytest.fixture(scope="session")
def net_b():
    return fixture("NET-B")


@pytest.fixture(scope="session")
def net_c():
    return fixture("NET-C")


@pytest.fixture
def left(net_a):
    """c consumes the 4-token produced by a."""
    return build_process(net_a, "abc")


@pytest.fixture
def right(net_a):
    """c consumes the 4-token produced by b (index 1 of the two available)."""
    return build_process(net_a, "abc", ExplicitChoice({(2, "4"): [1]}))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
