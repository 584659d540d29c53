import random

import pytest

from lsig.algebra.ring import RingParams
from lsig.presets import preset


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture(scope="session")
def tiny():
    return preset("schnorr-tiny")


@pytest.fixture(scope="session")
def desk_group():
    return preset("schnorr-desk")


@pytest.fixture(scope="session")
def rlwe():
    return preset("rlwe-desk")


@pytest.fixture(scope="session")
def small_ring():
    # n=4, q=19: the smallest handy ring with q = 3 mod 8
    return RingParams(n=4, q=19, sigma=2.0, mu=4)


ACCEPTANCE_LINES = []


def record_criterion(label: str, ok: bool, detail: str):
    ACCEPTANCE_LINES.append(f"{label} {'PASS' if ok else 'FAIL'}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: (s[0] != "C", int(s[1:].split()[0]))):
            terminalreporter.write_line(line)
