import random

import pytest

from nangle.ring import RingSpec

Z4 = RingSpec.parse("z4")
Z9 = RingSpec.parse("z9")
F2E = RingSpec.parse("f2eps")


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(params=["z4", "z9", "f2eps"])
def spec(request):
    return RingSpec.parse(request.param)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
