import itertools
import os
from pathlib import Path

import numpy as np
import pytest

from gxtsp.instance import fig1_fixture
from gxtsp.tour import Tour

DATA = Path(__file__).parent / "data"

FATHER_LABELS = [4, 5, 7, 3, 2, 1, 6, 8]
MOTHER_LABELS = [5, 1, 7, 3, 6, 2, 4, 8]


def zero_based(labels):
    return [v - 1 for v in labels]


def labels(order):
    return [v + 1 for v in order]


@pytest.fixture
def fig1():
    return fig1_fixture()


@pytest.fixture
def parents(fig1):
    return (Tour.from_order(zero_based(FATHER_LABELS), fig1),
            Tour.from_order(zero_based(MOTHER_LABELS), fig1))


def brute_force_optimum(inst):
    """Shortest tour by enumerating all (n-1)! orders with node 0 fixed."""
    D = inst.dist_matrix
    best = None
    for rest in itertools.permutations(range(1, inst.n)):
        order = (0,) + rest
        length = sum(int(D[order[k], order[(k + 1) % inst.n]]) for k in range(inst.n))
        if best is None or length < best:
            best = length
    return best


def improving_two_exchange(order, D):
    """First (i, j) 2-exchange that shortens ``order``, or None. Full scan."""
    n = len(order)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            a, b = order[i], order[i + 1]
            c, d = order[j], order[(j + 1) % n]
            if D[a][c] + D[b][d] < D[a][b] + D[c][d]:
                return i, j
    return None


def random_tour(inst, rng):
    return Tour.from_order(rng.permutation(inst.n).tolist(), inst)


def tsplib_path(name):
    """Locate a TSPLIB file in $GXTSP_TSPLIB_DIR or tests/data."""
    dirs = [os.environ.get("GXTSP_TSPLIB_DIR"), DATA, DATA / "tsplib"]
    for d in dirs:
        if d and (Path(d) / f"{name}.tsp").exists():
            return Path(d) / f"{name}.tsp"
    return None


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(tag, passed, detail)."""

    def record(tag, passed, detail):
        _CRITERIA.append((tag, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for tag, passed, detail in sorted(_CRITERIA, key=lambda c: c[0]):
        terminalreporter.write_line(f"{tag}: {'PASS' if passed else 'FAIL'} - {detail}")
