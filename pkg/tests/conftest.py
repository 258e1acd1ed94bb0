import itertools

import numpy as np
import pytest

from almostlinear.graph import ErdosRenyiSpec, from_edges, gen_er


def cycle(n):
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return from_edges(n, list(itertools.combinations(range(n), 2)))


def random_graph(rng, n_max=50, p_range=(0.05, 0.5)):
    n = int(rng.integers(2, n_max + 1))
    p = float(rng.uniform(*p_range))
    return gen_er(ErdosRenyiSpec(n, p, int(rng.integers(2**32))))


@pytest.fixture
def edge():
    return from_edges(2, [(0, 1)])


@pytest.fixture
def k3():
    return complete(3)


@pytest.fixture
def c4():
    return cycle(4)


@pytest.fixture
def c5():
    return cycle(5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    def _report(num, name, ok, detail=""):
        line = f"ACCEPTANCE {num:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
