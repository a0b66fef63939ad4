import numpy as np
import pytest

from tsmine.dataset import SynthConfig, generate_synthetic
from tsmine.pipeline import RunConfig, clean_log


@pytest.fixture(scope="session")
def small_log():
    return generate_synthetic(SynthConfig(days=6), seed=3)


@pytest.fixture(scope="session")
def small_clean(small_log):
    return clean_log(small_log, RunConfig())[0]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
