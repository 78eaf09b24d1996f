import warnings

import numpy as np
import pytest

from scalelab import reference_dataset
from scalelab.errors import ExtrapolationWarning
from scalelab.powerlaw import fit_scaling_law

SPLITS = ("SC", "ST", "UC")


@pytest.fixture(autouse=True)
def _quiet_extrapolation():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExtrapolationWarning)
        yield


@pytest.fixture(scope="session")
def ref():
    return reference_dataset()


@pytest.fixture(scope="session")
def laws(ref):
    return {s: fit_scaling_law(ref, s) for s in SPLITS}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = {}


def record_criterion(number, title, failures):
    ACCEPTANCE[number] = (title, list(failures))
    status = "PASS" if not failures else "FAIL"
    print(f"criterion {number} [{status}] {title}")
    for f in failures:
        print(f"    {f}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, failures = ACCEPTANCE[number]
        status = "PASS" if not failures else f"FAIL ({len(failures)} check(s) out of tolerance)"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")
        for f in failures:
            terminalreporter.write_line(f"      {f}")
