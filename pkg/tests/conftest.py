import numpy as np
import pytest

from crossplat import channels
from crossplat.qcore import H


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def library():
    """The single-qubit channels used throughout the exactness checks."""
    ex = channels.worked_example_channels()
    return {
        "identity": channels.identity_channel(1),
        "H": channels.unitary_channel(H, "H"),
        "depolarized_H": ex["depolarized_H"],
        "dephased_H": ex["dephased_H"],
        "amplitude_damping": channels.amplitude_damping_channel(0.3),
    }


def random_density(n, rng, rank=None):
    d = 1 << n
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_channel(n, rng, rank=3):
    """Random CPTP map from an isometry (Stinespring), for property tests."""
    from scipy.stats import unitary_group

    d = 1 << n
    u = unitary_group.rvs(d * rank, random_state=rng)
    iso = u[:, :d]
    ops = [iso[k * d:(k + 1) * d] for k in range(rank)]
    return channels.KrausChannel(tuple(ops), label="random")


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE = []


def record_criterion(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
