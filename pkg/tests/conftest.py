import sys

import numpy as np
import pytest

import traceform as tf
from traceform import Tail


@pytest.fixture
def svc1():
    return tf.svc_complement(1)


@pytest.fixture
def svc2():
    return tf.svc_complement(2)


@pytest.fixture
def svc3():
    return tf.svc_complement(3)


@pytest.fixture
def periodic1():
    return tf.periodic_fat_cantor(1, 2)


@pytest.fixture
def one_gap():
    # single unit gap spanning the window; F meets the window only at the edges
    return tf.build_interval_set([(0, 1)], (0, 1))


@pytest.fixture
def svc1_allg():
    return tf.svc_complement(1, tails=(Tail.ALL_G, Tail.ALL_G))


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "_REPORT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
