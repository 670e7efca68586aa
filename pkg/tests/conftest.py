from pathlib import Path

import pytest

from murmur.curves import CurveOverQ
from murmur.family import read_family

DATA = Path(__file__).parent / "data"


@pytest.fixture
def c37a():
    return CurveOverQ(0, 0, 1, -1, 0, label="37a1", conductor=37, arithmetic_rank=1)


@pytest.fixture
def family_path():
    return DATA / "cremona_small.csv"


@pytest.fixture
def family(family_path):
    return read_family(family_path)


def enumerate_points(ainvs, p):
    """Brute-force #E(F_p): every (x, y) on the affine model plus infinity."""
    a1, a2, a3, a4, a6 = ainvs
    return 1 + sum(
        1
        for x in range(p)
        for y in range(p)
        if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % p == 0
    )


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def check(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        lines.append(line)
        print(line, flush=True)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
