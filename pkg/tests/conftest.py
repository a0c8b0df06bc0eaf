import pytest

from eigenmoduli.family import ModelSpec, build_dft_family, build_oscillator_family
from eigenmoduli.moduli import compute_functional


@pytest.fixture(scope="session")
def toy():
    return build_dft_family(ModelSpec.dimer(n=2, t=1, U=1, Uprime=0))


@pytest.fixture(scope="session")
def toy_functional(toy):
    return compute_functional(toy)


@pytest.fixture(scope="session")
def oscillator():
    return build_oscillator_family(64)


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record an acceptance verdict; lines are printed in the terminal summary."""

    def record(label, passed, detail=""):
        _CRITERIA.append((label, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
