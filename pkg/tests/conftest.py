import numpy as np
import pytest

from greedylab.models import Haar
from greedylab.renorm import pipeline_renorm
from greedylab.seqlab import power_sequence
from greedylab.spaces import make_lp

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def haar_pipelines():
    """Lattice + main renorm of Haar(L=3) for p in {1.5, 3} with sigma = m^(1/p)."""
    return {p: pipeline_renorm(Haar(3, p), power_sequence(1 / p, 8)) for p in (1.5, 3.0)}


@pytest.fixture(scope="session")
def l2_pipeline():
    return pipeline_renorm(make_lp(2, 4), power_sequence(0.5, 4))


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
