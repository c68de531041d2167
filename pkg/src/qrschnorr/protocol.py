"""Non-interactive Schnorr identification with freshness and replay checks.

Prover: pick r, commit t = g^r, hash (t, y, nonce, timestamp) into the
challenge c, respond s = r + c*x mod (p-1).  Verifier: g^s == t * y^c.

The challenge is the full SHA-256 integer on both sides; it is never
reduced, since the exponent arithmetic only has to agree between the two
equations.  ``reduced_challenge`` is a test-mode substitute that folds c
into [0, p-2] so small-group forgery rates have an exact analytic value.
"""

from __future__ import annotations

import enum
import hashlib
import heapq
import secrets
import threading
import time
from dataclasses import dataclass, field
from typing import Callable

from .errors import EntropyError, KeyNotFoundError, ParamsMismatchError
from .group import GroupParams, mod_exp
from .identity import KeyPair, KeyRegistry, MAX_KEY_ID_LENGTH

NONCE_BYTES = 16
DEFAULT_DELTA_SECONDS = 30
DEFAULT_NONCE_TTL_SECONDS = 120
TIMESTAMP_BYTES = 8

Clock = Callable[[], int]
ChallengeFn = Callable[[GroupParams, int, int, bytes, int], int]


def system_clock() -> int:
    return int(time.time())


@dataclass(frozen=True)
class Proof:
    """The transported proof (t, s, nonce, timestamp) plus the prover's key id."""

    t: int
    s: int
    nonce: bytes
    timestamp: int
    key_id: str = ""

    def __post_init__(self):
        for name in ("t", "s", "timestamp"):
            value = getattr(self, name)
            if type(value) is not int or value < 0:
                raise ValueError(f"{name} must be a non-negative integer")
        if self.timestamp >= 1 << (8 * TIMESTAMP_BYTES):
            raise ValueError("timestamp does not fit in 64 bits")
        if not isinstance(self.nonce, bytes) or len(self.nonce) != NONCE_BYTES:
            raise ValueError(f"nonce must be exactly {NONCE_BYTES} bytes")
        if not isinstance(self.key_id, str) or len(self.key_id) > MAX_KEY_ID_LENGTH:
            raise ValueError(f"key_id must be a string of at most {MAX_KEY_ID_LENGTH} characters")


@dataclass(frozen=True)
class FreshnessPolicy:
    delta_seconds: int = DEFAULT_DELTA_SECONDS
    nonce_ttl_seconds: int = DEFAULT_NONCE_TTL_SECONDS

    def __post_init__(self):
        if self.delta_seconds < 0:
            raise ValueError("delta_seconds must be non-negative")
        # a nonce must outlive every window in which its proof could still verify
        if self.nonce_ttl_seconds < 2 * self.delta_seconds:
            raise ValueError("nonce_ttl_seconds must be at least 2 * delta_seconds")

    @classmethod
    def with_delta(cls, delta_seconds: int) -> "FreshnessPolicy":
        return cls(delta_seconds, max(DEFAULT_NONCE_TTL_SECONDS, 2 * delta_seconds))


class Reason(str, enum.Enum):
    OK = "ok"
    STALE_TIMESTAMP = "stale_timestamp"
    FUTURE_TIMESTAMP = "future_timestamp"
    REPLAYED_NONCE = "replayed_nonce"
    BAD_RANGE = "bad_range"
    EQUATION_FAILED = "equation_failed"
    UNKNOWN_KEY = "unknown_key"
    PARAMS_MISMATCH = "params_mismatch"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class VerifyDecision:
    accepted: bool
    reason: Reason

    def __post_init__(self):
        if self.accepted != (self.reason is Reason.OK):
            raise ValueError("accepted must be true exactly when reason is ok")

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        return "ACCEPT" if self.accepted else f"REJECT:{self.reason.value}"

    @classmethod
    def accept(cls) -> "VerifyDecision":
        return cls(True, Reason.OK)

    @classmethod
    def reject(cls, reason: Reason) -> "VerifyDecision":
        return cls(False, reason)


class NonceStore:
    """Seen-nonce memory with TTL expiry and atomic check-and-insert."""

    def __init__(self, policy: FreshnessPolicy | None = None):
        self.policy = policy or FreshnessPolicy()
        self.seen: dict[bytes, int] = {}
        self._expiry: list[tuple[int, bytes]] = []
        self._lock = threading.Lock()

    def _evict(self, now: int) -> None:
        ttl = self.policy.nonce_ttl_seconds
        heap = self._expiry
        while heap and now - heap[0][0] > ttl:
            inserted, nonce = heapq.heappop(heap)
            if self.seen.get(nonce) == inserted:
                del self.seen[nonce]

    def evict(self, now: int) -> None:
        with self._lock:
            self._evict(now)

    def check_and_insert(self, nonce: bytes, now: int) -> bool:
        if len(nonce) != NONCE_BYTES:
            raise ValueError(f"nonce must be exactly {NONCE_BYTES} bytes")
        nonce = bytes(nonce)
        with self._lock:
            self._evict(now)
            if nonce in self.seen:
                return False
            self.seen[nonce] = now
            heapq.heappush(self._expiry, (now, nonce))
            return True

    def clear(self) -> None:
        with self._lock:
            self.seen.clear()
            self._expiry.clear()

    def __len__(self) -> int:
        return len(self.seen)

    def __contains__(self, nonce: bytes) -> bool:
        return nonce in self.seen


def nonce_check_and_insert(store: NonceStore, nonce: bytes, now: int) -> bool:
    return store.check_and_insert(nonce, now)


def commit(params: GroupParams, rng=None, *, r: int | None = None) -> tuple[int, int]:
    """Return ``(r, t)`` with r uniform in [1, p-2] and ``t = g^r mod p``.

    ``r`` forces the ephemeral exponent (tests only).
    """
    if r is None:
        rng = rng or secrets.SystemRandom()
        try:
            r = rng.randrange(1, params.p - 1)
        except (OSError, NotImplementedError) as exc:
            raise EntropyError(f"random source failed: {exc}") from exc
    return r, mod_exp(params.g, r, params.p)


def challenge_preimage(params: GroupParams, t: int, y: int, nonce: bytes, timestamp: int) -> bytes:
    """Fixed-width ``t || y || nonce || timestamp``; no separators are needed."""
    if len(nonce) != NONCE_BYTES:
        raise ValueError(f"nonce must be exactly {NONCE_BYTES} bytes")
    width = params.element_bytes
    return (
        t.to_bytes(width, "big")
        + y.to_bytes(width, "big")
        + nonce
        + timestamp.to_bytes(TIMESTAMP_BYTES, "big")
    )


def derive_challenge(params: GroupParams, t: int, y: int, nonce: bytes, timestamp: int) -> int:
    digest = hashlib.sha256(challenge_preimage(params, t, y, nonce, timestamp)).digest()
    return int.from_bytes(digest, "big")


def reduced_challenge(params: GroupParams, t: int, y: int, nonce: bytes, timestamp: int) -> int:
    """Test-mode challenge: the SHA-256 challenge folded into [0, p-2]."""
    return derive_challenge(params, t, y, nonce, timestamp) % params.order


def respond(r: int, c: int, x: int, params: GroupParams) -> int:
    return (r + c * x) % params.order


def prove(
    params: GroupParams,
    keypair: KeyPair,
    clock: Clock = system_clock,
    rng=None,
    *,
    key_id: str = "",
    challenge_fn: ChallengeFn = derive_challenge,
    r: int | None = None,
) -> Proof:
    """Produce a fresh proof of knowledge of ``keypair.x``."""
    if keypair.params_digest != params.digest():
        raise ParamsMismatchError("key pair was generated for a different parameter set")
    rng = rng or secrets.SystemRandom()
    r, t = commit(params, rng, r=r)
    try:
        nonce = rng.randbytes(NONCE_BYTES)
    except (OSError, NotImplementedError) as exc:
        raise EntropyError(f"random source failed: {exc}") from exc
    timestamp = int(clock())
    c = challenge_fn(params, t, keypair.y, nonce, timestamp)
    s = respond(r, c, keypair.x, params)
    return Proof(t=t, s=s, nonce=nonce, timestamp=timestamp, key_id=key_id)


def check_freshness(timestamp: int, now: int, policy: FreshnessPolicy) -> bool:
    return abs(now - timestamp) <= policy.delta_seconds


def equation_holds(params: GroupParams, y: int, t: int, s: int, c: int) -> bool:
    p = params.p
    return mod_exp(params.g, s, p) == t * mod_exp(y, c, p) % p


def verify(
    params: GroupParams,
    registry: KeyRegistry,
    proof: Proof,
    clock: Clock = system_clock,
    policy: FreshnessPolicy | None = None,
    store: NonceStore | None = None,
    *,
    challenge_fn: ChallengeFn = derive_challenge,
) -> VerifyDecision:
    """Run the verifier checks in order; the first failure names the reason.

    Order: key lookup and parameter binding, range of t and s, timestamp
    window, nonce single use, then the Schnorr equation.  The nonce is only
    consumed once the timestamp has passed, so an expired copy cannot burn
    a victim's nonce.  Without ``store`` replay is not checked.
    """
    policy = policy or (store.policy if store is not None else FreshnessPolicy())
    try:
        public = registry.lookup(proof.key_id)
    except KeyNotFoundError:
        return VerifyDecision.reject(Reason.UNKNOWN_KEY)
    if public.params_digest != params.digest():
        return VerifyDecision.reject(Reason.PARAMS_MISMATCH)

    if not (1 <= proof.t < params.p and 0 <= proof.s < params.order):
        return VerifyDecision.reject(Reason.BAD_RANGE)

    now = int(clock())
    if proof.timestamp - now > policy.delta_seconds:
        return VerifyDecision.reject(Reason.FUTURE_TIMESTAMP)
    if now - proof.timestamp > policy.delta_seconds:
        return VerifyDecision.reject(Reason.STALE_TIMESTAMP)

    if store is not None and not store.check_and_insert(proof.nonce, now):
        return VerifyDecision.reject(Reason.REPLAYED_NONCE)

    c = challenge_fn(params, proof.t, public.y, proof.nonce, proof.timestamp)
    if not equation_holds(params, public.y, proof.t, proof.s, c):
        return VerifyDecision.reject(Reason.EQUATION_FAILED)
    return VerifyDecision.accept()
