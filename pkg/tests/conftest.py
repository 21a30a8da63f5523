import numpy as np
import pytest

from lcgf.lattice import Lattice
from lcgf.samplers import FieldSample


def make_field(values, d=1, model="TEST"):
    """Wrap a hand-written array (shape N^d, row-major) as a FieldSample."""
    values = np.asarray(values, dtype=float)
    N = values.shape[0]
    return FieldSample(Lattice(N, d), values.reshape(-1), model)


@pytest.fixture
def field_of():
    return make_field


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
