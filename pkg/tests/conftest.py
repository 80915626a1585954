import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, derandomize=True, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.register_profile("thorough", deadline=None, max_examples=300,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("LATTFREE_HYPOTHESIS", "default"))

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def hurwitz():
    from lattfree.numberfield import rationals
    from lattfree.pseudo import SkewOrder
    from lattfree.quaternion import QuatAlgebra, hurwitz_order
    H = QuatAlgebra(-1, -1, rationals())
    return SkewOrder(H.alg, hurwitz_order(H), H.F, H)
