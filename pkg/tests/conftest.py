import os
from pathlib import Path

import hypothesis
import numpy as np
import pytest

from modprom.eventlog import parse_traces, read_log

np.seterr(all="raise")

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).resolve().parent.parent / "data"
EXAMPLE_LOG = "T1 T2 T3\nT1 T2 T4 T6 T5 T7\nT1 T2 T4 T5 T6 T7\n"

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def example_log():
    return parse_traces(EXAMPLE_LOG)


@pytest.fixture(scope="session")
def etm_log():
    return read_log(DATA / "etm.traces", "traces")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
