import numpy as np
import pytest

import weingarten as w

# collected acceptance verdict lines, printed in the terminal summary
ACCEPTANCE_LINES = []


def record_acceptance(num, name, passed, detail=""):
    status = "PASS" if passed else "FAIL"
    line = f"ACCEPTANCE {num:02d} {name}: {status}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


CATENOID_C = 1.0 / np.sqrt(2.0)


def catenoid_height(r, c=CATENOID_C, r0=1.0):
    """Catenoid graph height with u(r0) = 0, u'(r0) matching the scale c."""
    r = np.asarray(r, dtype=float)
    return c * (np.arccosh(r / c) - np.arccosh(r0 / c))


def catenoid_slope(r, c=CATENOID_C):
    r = np.asarray(r, dtype=float)
    return c / np.sqrt(r * r - c * c)


def linear_relation_slope(r, a, R0=1.0, C0=1.0):
    """Closed-form u' for the linear relation, from separation of variables."""
    C = C0 * R0 ** (-a) / np.sqrt(1.0 + C0 * C0)
    r = np.asarray(r, dtype=float)
    return C * r ** a / np.sqrt(1.0 - C * C * r ** (2 * a))


@pytest.fixture(scope="session")
def minimal_spec():
    return w.minimal()


@pytest.fixture(scope="session")
def expblend_spec():
    return w.expblend(0.25)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
