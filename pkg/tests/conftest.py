import numpy as np
import pytest

from zeus_ode import GaussianMixture, Schedule

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_criterion(name: str, passed: bool, detail: str = ""):
    ACCEPTANCE_RESULTS.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def vp_linear():
    return Schedule("vp_linear")


@pytest.fixture
def vp_cosine():
    return Schedule("vp_cosine")


@pytest.fixture
def rectified_flow():
    return Schedule("rectified_flow")


@pytest.fixture
def single_gaussian_1d():
    return GaussianMixture(weights=[1.0], means=[[0.5]], variances=[0.25])


@pytest.fixture
def standard_normal_1d():
    return GaussianMixture(weights=[1.0], means=[[0.0]], variances=[1.0])


@pytest.fixture
def gmm_2d():
    """The three-component instance used by the end-to-end experiments."""
    return GaussianMixture(
        weights=[0.6, 0.25, 0.15],
        means=[[-1.5, 0.5], [2.5, -0.5], [0.0, 2.5]],
        variances=[0.12, 0.30, 0.08],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
