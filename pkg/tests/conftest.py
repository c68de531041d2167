import random

import pytest

from _data import ACCEPTANCE_LINES, P256, TOY, FixedClock
from qrschnorr.identity import KeyRegistry, keygen
from qrschnorr.protocol import FreshnessPolicy, NonceStore


@pytest.fixture
def toy():
    return TOY


@pytest.fixture
def params256():
    return P256


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture
def clock():
    return FixedClock()


@pytest.fixture
def policy():
    return FreshnessPolicy()


@pytest.fixture
def store(policy):
    return NonceStore(policy)


@pytest.fixture
def alice256(params256, rng):
    """(keypair, registry) with the key registered as 'alice'."""
    kp = keygen(params256, rng)
    reg = KeyRegistry()
    reg.register("alice", kp.y, kp.params_digest)
    return kp, reg


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line[1])
