from fractions import Fraction

import pytest

import riskdist as rd


def make_two_point():
    h = Fraction(5, 2)
    return rd.validate_metric(["x", "y"], [[0, h], [h, 0]])


def make_path3():
    return rd.validate_metric(["a", "b", "c"], [[0, 1, 2], [1, 0, 1], [2, 1, 0]])


def make_cycle4():
    d = [
        [0, 1, 2, 1],
        [1, 0, 1, 2],
        [2, 1, 0, 1],
        [1, 2, 1, 0],
    ]
    return rd.validate_metric(["a", "b", "c", "d"], d)


def make_star5():
    # tree metric: center o, leaves at weights 1, 2, 3, 4
    w = {"o": 0, "p": 1, "q": 2, "r": 3, "s": 4}
    labels = list(w)
    d = [
        [
            0 if a == b else (w[a] + w[b] if "o" not in (a, b) else w[a] + w[b])
            for b in labels
        ]
        for a in labels
    ]
    return rd.validate_metric(labels, d)


def make_grid6():
    # 2 x 3 grid with L1 distances
    pts = [f"{i}{j}" for i in range(2) for j in range(3)]
    d = [
        [abs(a // 3 - b // 3) + abs(a % 3 - b % 3) for b in range(6)]
        for a in range(6)
    ]
    return rd.validate_metric(pts, d)


def fixture_spaces():
    return [make_two_point(), make_path3(), make_cycle4(), make_star5(), make_grid6()]


@pytest.fixture
def two_point():
    return make_two_point()


@pytest.fixture
def p3():
    return make_path3()


@pytest.fixture
def cycle4():
    return make_cycle4()


@pytest.fixture
def grid6():
    return make_grid6()
