import numpy as np
import pytest

from c11cert import instances
from c11cert.model import Problem
from c11cert.polynomial import Polynomial


def fd_grad(fn, x, h=1e-6):
    """Central differences, used as an oracle independent of the term-wise derivatives."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (fn(x + e) - fn(x - e)) / (2 * h)
    return out


def fd_jacobian(grad, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((grad(x + e) - grad(x - e)) / (2 * h))
    J = np.array(cols).T
    return 0.5 * (J + J.T)


def poly(n, *terms):
    return Polynomial(n, terms)


def unconstrained(*objectives, n=None):
    n = objectives[0].n if n is None else n
    return Problem(n, tuple(objectives))


@pytest.fixture
def kink_equality():
    return instances.kink_equality(), np.array([1.0, 0.0])


@pytest.fixture
def orthant_linear():
    return instances.orthant_linear(), np.array([0.0, 0.0])


@pytest.fixture
def biobjective_kink():
    return instances.biobjective_kink(), np.array([0.0])


@pytest.fixture
def saddle():
    return unconstrained(poly(2, (1.0, (2, 0)), (-1.0, (0, 2)))), np.zeros(2)


@pytest.fixture
def bowl():
    return unconstrained(poly(2, (1.0, (2, 0)), (1.0, (0, 2)))), np.zeros(2)


@pytest.fixture
def quartic():
    return unconstrained(poly(1, (1.0, (4,)))), np.zeros(1)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
