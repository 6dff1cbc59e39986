import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from repeaterlab.bell import BellDiagonalState
from repeaterlab.noise import NoiseParams

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def golden():
    return json.loads((DATA / "golden.json").read_text())


@st.composite
def bell_states(draw):
    w = np.array([draw(st.floats(0.0, 1.0)) for _ in range(4)]) + 1e-9
    return BellDiagonalState.from_vector(w / w.sum())


def noise_params(lo=0.85):
    unit = st.floats(lo, 1.0)
    return st.builds(NoiseParams, unit, unit, unit)


def random_states(n, seed):
    rng = np.random.default_rng(seed)
    return [BellDiagonalState.from_vector(rng.dirichlet(np.ones(4))) for _ in range(n)]


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
