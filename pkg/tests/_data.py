"""Shared frozen values for the test suite."""

from qrschnorr.group import GroupParams

# generate_params(256, random.Random(2024)); primality of p and (p-1)/2 and
# the order of g confirmed independently with sympy
P256 = GroupParams(
    p=106290217287309379369577730095831160214899092728631171102057170996042941183779,
    g=2,
    bit_length=256,
)
TOY = GroupParams(p=23, g=5, bit_length=5)
NOW = 1_700_000_000


class FixedClock:
    def __init__(self, now=NOW):
        self.now = now

    def __call__(self):
        return self.now


# filled by test_acceptance, printed by the conftest terminal summary hook
ACCEPTANCE_LINES: list[tuple[int, str]] = []
