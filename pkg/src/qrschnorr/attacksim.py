"""Scripted adversaries against the verifier.

Each simulation runs on a virtual clock and records the verifier's reason
for every illegitimate submission.  That shows which layer stops each
attack.  Nonce tampering, for instance, is caught by the hash binding
(``equation_failed``), not by the nonce store.
"""

from __future__ import annotations

import enum
import json
import random
import secrets
from collections import Counter
from dataclasses import dataclass, field, replace

from .errors import ParameterError
from .group import GroupParams
from .identity import KeyRegistry, keygen
from .protocol import (
    NONCE_BYTES,
    FreshnessPolicy,
    NonceStore,
    Proof,
    derive_challenge,
    prove,
    reduced_challenge,
    verify,
)

DEFAULT_START_TIME = 1_700_000_000
MIN_FORGERY_TRIALS = 10_000
SMALL_GROUP_LIMIT = 1 << 16
INSECURE_MODE_BITS = 64


class Scenario(str, enum.Enum):
    REPLAY = "replay"
    STALE_REPLAY = "stale_replay"
    FUTURE_STAMP = "future_stamp"
    TAMPER_T = "tamper_t"
    TAMPER_S = "tamper_s"
    TAMPER_NONCE = "tamper_nonce"
    TAMPER_TIMESTAMP = "tamper_timestamp"
    RANDOM_FORGERY = "random_forgery"

    def __str__(self) -> str:
        return self.value


TAMPER_SCENARIOS = (
    Scenario.TAMPER_T,
    Scenario.TAMPER_S,
    Scenario.TAMPER_NONCE,
    Scenario.TAMPER_TIMESTAMP,
)


@dataclass
class AttackOutcome:
    scenario: Scenario
    trials: int = 0
    accepts: int = 0
    reasons: Counter = field(default_factory=Counter)

    def record(self, decision) -> None:
        self.trials += 1
        self.accepts += decision.accepted
        self.reasons[decision.reason.value] += 1

    @property
    def accept_rate(self) -> float:
        return self.accepts / self.trials if self.trials else 0.0

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.value,
            "trials": self.trials,
            "accepts": self.accepts,
            "reasons": dict(sorted(self.reasons.items())),
        }

    def to_json(self) -> bytes:
        return json.dumps(self.to_dict(), indent=2).encode() + b"\n"


class SimClock:
    """Manually advanced clock; callable like the protocol's clock argument."""

    def __init__(self, now: int = DEFAULT_START_TIME):
        self.now = now

    def __call__(self) -> int:
        return self.now

    def advance(self, seconds: int) -> None:
        self.now += seconds


def _rng(seed):
    return random.Random(seed) if seed is not None else secrets.SystemRandom()


def _victim(params, registry, rng):
    registry = registry if registry is not None else KeyRegistry()
    keypair = keygen(params, rng)
    key_id = "victim-" + rng.randbytes(6).hex()
    registry.register(key_id, keypair.y, keypair.params_digest)
    return registry, keypair, key_id


def _check_trials(trials: int) -> None:
    if trials < 1:
        raise ValueError("trials must be >= 1")


def simulate_replay(
    params: GroupParams,
    registry: KeyRegistry | None = None,
    policy: FreshnessPolicy | None = None,
    trials: int = 1000,
    *,
    delay_seconds: int = 0,
    clear_store: bool = False,
    seed=None,
) -> AttackOutcome:
    """Accept one honest proof, then resubmit the identical proof.

    ``delay_seconds`` ages the copy before resubmission; past the window the
    scenario is reported as ``stale_replay``.  ``clear_store`` wipes the
    verifier's nonce memory in between, isolating the timestamp layer.
    """
    _check_trials(trials)
    policy = policy or FreshnessPolicy()
    rng = _rng(seed)
    registry, keypair, key_id = _victim(params, registry, rng)
    clock = SimClock()
    store = NonceStore(policy)
    scenario = Scenario.STALE_REPLAY if delay_seconds > policy.delta_seconds else Scenario.REPLAY
    outcome = AttackOutcome(scenario)
    for _ in range(trials):
        proof = prove(params, keypair, clock, rng, key_id=key_id)
        first = verify(params, registry, proof, clock, policy, store)
        if not first.accepted:
            raise RuntimeError(f"honest proof rejected: {first}")
        if clear_store:
            store.clear()
        clock.advance(delay_seconds)
        outcome.record(verify(params, registry, proof, clock, policy, store))
        clock.advance(1)
    return outcome


def simulate_future_stamp(
    params: GroupParams,
    registry: KeyRegistry | None = None,
    policy: FreshnessPolicy | None = None,
    trials: int = 1000,
    *,
    skew_seconds: int | None = None,
    seed=None,
) -> AttackOutcome:
    """Proofs stamped ``skew_seconds`` ahead of the verifier (default Δ + 1)."""
    _check_trials(trials)
    policy = policy or FreshnessPolicy()
    skew = policy.delta_seconds + 1 if skew_seconds is None else skew_seconds
    rng = _rng(seed)
    registry, keypair, key_id = _victim(params, registry, rng)
    clock = SimClock()
    outcome = AttackOutcome(Scenario.FUTURE_STAMP)
    for _ in range(trials):
        ahead = SimClock(clock.now + skew)
        proof = prove(params, keypair, ahead, rng, key_id=key_id)
        outcome.record(verify(params, registry, proof, clock, policy, NonceStore(policy)))
        clock.advance(1)
    return outcome


def tamper(proof: Proof, scenario: Scenario, params: GroupParams, rng, max_shift: int = 1) -> Proof:
    """Return ``proof`` with one field mutated according to ``scenario``."""
    if scenario is Scenario.TAMPER_T:
        return replace(proof, t=proof.t ^ (1 << rng.randrange(8 * params.element_bytes)))
    if scenario is Scenario.TAMPER_S:
        return replace(proof, s=proof.s ^ (1 << rng.randrange(8 * params.element_bytes)))
    if scenario is Scenario.TAMPER_NONCE:
        bit = rng.randrange(8 * NONCE_BYTES)
        nonce = bytearray(proof.nonce)
        nonce[bit // 8] ^= 1 << (bit % 8)
        return replace(proof, nonce=bytes(nonce))
    if scenario is Scenario.TAMPER_TIMESTAMP:
        shift = rng.randint(1, max_shift) * rng.choice((-1, 1))
        if proof.timestamp + shift < 0:
            shift = -shift
        return replace(proof, timestamp=proof.timestamp + shift)
    raise ValueError(f"{scenario} is not a tamper scenario")


def simulate_tamper(
    params: GroupParams,
    registry: KeyRegistry | None = None,
    policy: FreshnessPolicy | None = None,
    trials: int = 1000,
    *,
    scenarios=TAMPER_SCENARIOS,
    max_timestamp_shift: int = 1,
    challenge_fn=derive_challenge,
    seed=None,
) -> dict[Scenario, AttackOutcome]:
    """Mutate one field of a fresh honest proof per trial and submit it.

    Timestamp shifts are drawn from ±[1, max_timestamp_shift]; shifts inside
    the window fail the equation because the timestamp is hashed into the
    challenge, larger ones fail the freshness check first.
    """
    _check_trials(trials)
    policy = policy or FreshnessPolicy()
    rng = _rng(seed)
    registry, keypair, key_id = _victim(params, registry, rng)
    clock = SimClock()
    outcomes = {}
    for scenario in map(Scenario, scenarios):
        if scenario not in TAMPER_SCENARIOS:
            raise ValueError(f"{scenario} is not a tamper scenario")
        outcome = AttackOutcome(scenario)
        for _ in range(trials):
            proof = prove(params, keypair, clock, rng, key_id=key_id, challenge_fn=challenge_fn)
            forged = tamper(proof, scenario, params, rng, max_timestamp_shift)
            decision = verify(
                params, registry, forged, clock, policy, NonceStore(policy),
                challenge_fn=challenge_fn,
            )
            outcome.record(decision)
            clock.advance(1)
        outcomes[scenario] = outcome
    return outcomes


def simulate_random_forgery(
    small_params: GroupParams,
    trials: int = 100_000,
    *,
    insecure: bool = False,
    reduced: bool | None = None,
    policy: FreshnessPolicy | None = None,
    seed=None,
) -> AttackOutcome:
    """Submit uniformly random ``(t, s)`` pairs under a registered key.

    With the reduced challenge each (t, c) pair has exactly one accepting
    ``s`` in [0, p-2], so the expected accept rate is ``1 / (p - 1)``.
    Reduction is on by default for p < 2^16.  Groups of 64 bits or more
    need ``insecure=True``.
    """
    params = small_params
    if trials < MIN_FORGERY_TRIALS:
        raise ValueError(f"random forgery needs at least {MIN_FORGERY_TRIALS} trials")
    if params.p.bit_length() >= INSECURE_MODE_BITS and not insecure:
        raise ParameterError("random forgery on large groups requires insecure mode")
    if reduced is None:
        reduced = params.p < SMALL_GROUP_LIMIT
    challenge_fn = reduced_challenge if reduced else derive_challenge
    policy = policy or FreshnessPolicy()
    rng = _rng(seed)
    registry, _, key_id = _victim(params, None, rng)
    clock = SimClock()
    store = NonceStore(policy)
    outcome = AttackOutcome(Scenario.RANDOM_FORGERY)
    for _ in range(trials):
        forged = Proof(
            t=rng.randrange(1, params.p),
            s=rng.randrange(params.order),
            nonce=rng.randbytes(NONCE_BYTES),
            timestamp=clock(),
            key_id=key_id,
        )
        outcome.record(verify(params, registry, forged, clock, policy, store, challenge_fn=challenge_fn))
        clock.advance(1)
    return outcome


def expected_forgery_rate(params: GroupParams) -> float:
    return 1 / params.order
