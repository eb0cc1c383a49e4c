import pytest

from vvalla.local_model import build_ring, declare_ideal


@pytest.fixture(scope="session")
def plane():
    return build_ring(vars=("x", "y"))


@pytest.fixture(scope="session")
def cusp():
    return build_ring(vars=("x", "y"), relations=["y^3 - x^4"])


@pytest.fixture(scope="session")
def cone():
    return build_ring(vars=("x", "y", "z"), relations=["x*z - y^2"])


@pytest.fixture(scope="session")
def d0(plane):
    """Depth-0 associated graded ring: x^2 y^2 is Ratliff-Rush but not in I."""
    return declare_ideal(plane, ["x^4", "x^3*y", "x*y^3", "y^4"])


@pytest.fixture(scope="session")
def d1(plane):
    return declare_ideal(plane, ["x^3", "x^2*y", "y^3"])


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance criterion lines, which pytest -v would otherwise capture."""
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call" or "test_acceptance" not in rep.nodeid:
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append(props["criterion"])
            elif rep.failed:
                lines.append(f"{rep.nodeid.split('::')[-1]}: fail")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
