"""Safe-prime groups Z_p^* and the arithmetic the protocol runs on.

Every computation happens in the full multiplicative group modulo a safe
prime ``p = 2q + 1``.  With ``q`` prime the only subgroup orders are 1, 2,
q and 2q, so a candidate ``g`` generates the whole group exactly when
``g^2 != 1`` and ``g^q != 1``.

A 256-bit modulus matches the benchmark sizes used throughout this package
but is far too small for real deployments; use 2048 bits or more there.
"""

from __future__ import annotations

import hashlib
import json
import secrets
from dataclasses import dataclass, field
from functools import cached_property

from .errors import EntropyError, ParameterError

SECURE_BIT_LENGTHS = (256, 512, 1024, 2048)
# bit lengths below 256 exist for oracles and attack simulation only
MIN_TEST_BITS = 3
MAX_TEST_BITS = 64
DEFAULT_MR_ROUNDS = 40

_SMALL_PRIMES = [n for n in range(2, 2000) if all(n % d for d in range(2, int(n**0.5) + 1))]


def mod_exp(base: int, exponent: int, modulus: int) -> int:
    """Compute ``base ** exponent % modulus`` by left-to-right square-and-multiply.

    >>> mod_exp(5, 6, 23)
    8
    """
    if modulus < 2:
        raise ValueError(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    base %= modulus
    result = 1
    for bit in bin(exponent)[2:]:
        result = result * result % modulus
        if bit == "1":
            result = result * base % modulus
    return result


def is_probable_prime(n: int, rounds: int = DEFAULT_MR_ROUNDS, rng=None) -> bool:
    """Miller-Rabin test.

    A prime always passes.  A composite passes with probability at most
    ``4 ** -rounds``.  Bases are drawn from ``rng`` (anything exposing
    ``randrange``); the default is the OS entropy pool.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    if n < _SMALL_PRIMES[-1] ** 2:
        return True

    rng = rng or secrets.SystemRandom()
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class GroupParams:
    """Public group parameters: safe prime ``p``, generator ``g``, and the bit size of ``p``."""

    p: int
    g: int
    bit_length: int

    @property
    def q(self) -> int:
        return (self.p - 1) // 2

    @property
    def order(self) -> int:
        return self.p - 1

    @property
    def element_bytes(self) -> int:
        """Fixed byte width used for group elements and exponents on the wire."""
        return (self.bit_length + 7) // 8

    def to_json(self) -> bytes:
        """Canonical parameter-file bytes (big integers as decimal strings)."""
        doc = {"p": str(self.p), "g": str(self.g), "bit_length": self.bit_length}
        return json.dumps(doc, separators=(",", ":")).encode() + b"\n"

    @classmethod
    def from_json(cls, data: bytes | str) -> "GroupParams":
        try:
            doc = json.loads(data)
            p, g, bits = doc["p"], doc["g"], doc["bit_length"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ParameterError(f"malformed parameter file: {exc}") from None
        if not (isinstance(p, str) and isinstance(g, str)) or type(bits) is not int:
            raise ParameterError("p and g must be decimal strings, bit_length an integer")
        if not (p.isdigit() and g.isdigit()):
            raise ParameterError("p and g must be unsigned decimal strings")
        return cls(int(p), int(g), bits)

    @cached_property
    def _digest(self) -> bytes:
        return hashlib.sha256(self.to_json()).digest()

    def digest(self) -> bytes:
        """SHA-256 of the canonical parameter file; binds keys to this group."""
        return self._digest


@dataclass
class ValidationReport:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok


def validate_params(params: GroupParams, rounds: int = DEFAULT_MR_ROUNDS) -> ValidationReport:
    """Check every GroupParams invariant, collecting the names of those violated.

    Failure names: ``bit_length_mismatch``, ``p_not_prime``, ``p_not_safe``,
    ``g_out_of_range``, ``g_order_trivial`` (g^2 = 1), ``g_not_generator``
    (g^q = 1).  Generator checks are skipped when p itself is unusable.
    """
    report = ValidationReport()
    p, g = params.p, params.g
    if params.bit_length != p.bit_length():
        report.failures.append("bit_length_mismatch")
    if not is_probable_prime(p, rounds):
        report.failures.append("p_not_prime")
        return report
    if p < 5 or not is_probable_prime((p - 1) // 2, rounds):
        report.failures.append("p_not_safe")
        return report
    if not 1 < g < p:
        report.failures.append("g_out_of_range")
        return report
    if mod_exp(g, 2, p) == 1:
        report.failures.append("g_order_trivial")
    elif mod_exp(g, params.q, p) == 1:
        report.failures.append("g_not_generator")
    return report


def check_bit_length(bit_length: int) -> None:
    if type(bit_length) is not int:
        raise ParameterError("bit_length must be an integer")
    if bit_length in SECURE_BIT_LENGTHS or MIN_TEST_BITS <= bit_length <= MAX_TEST_BITS:
        return
    raise ParameterError(
        f"unsupported bit_length {bit_length}; use one of {SECURE_BIT_LENGTHS} "
        f"or a test size between {MIN_TEST_BITS} and {MAX_TEST_BITS}"
    )


def find_generator(p: int) -> int:
    """Smallest g >= 2 generating Z_p^* for a safe prime p."""
    q = (p - 1) // 2
    g = 2
    while g < p:
        if mod_exp(g, 2, p) != 1 and mod_exp(g, q, p) != 1:
            return g
        g += 1
    raise ParameterError(f"no generator found modulo {p}")


def _random_safe_prime(bit_length: int, rng) -> int:
    lo, hi = 1 << (bit_length - 2), 1 << (bit_length - 1)
    # tiny sizes: enumerate instead of sampling
    if bit_length <= 16:
        candidates = [
            q for q in range(lo, hi)
            if is_probable_prime(q) and is_probable_prime(2 * q + 1)
        ]
        if not candidates:
            raise ParameterError(f"no safe prime with {bit_length} bits")
        return 2 * candidates[rng.randrange(len(candidates))] + 1

    sieve = _SMALL_PRIMES[1:]
    while True:
        q = rng.randrange(lo, hi) | 1
        p = 2 * q + 1
        if any(q % sp == 0 or p % sp == 0 for sp in sieve):
            continue
        if not (is_probable_prime(q, 1, rng) and is_probable_prime(p, 1, rng)):
            continue
        if is_probable_prime(q, DEFAULT_MR_ROUNDS, rng) and is_probable_prime(p, DEFAULT_MR_ROUNDS, rng):
            return p


def generate_params(bit_length: int, rng=None) -> GroupParams:
    """Draw a random safe prime of exactly ``bit_length`` bits and its smallest generator."""
    check_bit_length(bit_length)
    rng = rng or secrets.SystemRandom()
    try:
        p = _random_safe_prime(bit_length, rng)
    except (OSError, NotImplementedError) as exc:
        raise EntropyError(f"random source failed: {exc}") from exc
    return GroupParams(p=p, g=find_generator(p), bit_length=bit_length)
