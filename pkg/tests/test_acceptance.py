"""End-to-end acceptance checks, one test per criterion.

Each test appends a ``[PASS]``/``[FAIL]`` line that the terminal summary
prints at the end of the run.  The module also runs standalone::

    python tests/test_acceptance.py
"""

import random
import statistics
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from _data import ACCEPTANCE_LINES, P256, TOY  # noqa: E402
from qrschnorr.attacksim import (  # noqa: E402
    TAMPER_SCENARIOS,
    expected_forgery_rate,
    simulate_random_forgery,
    simulate_replay,
    simulate_tamper,
)
from qrschnorr.bench import run_bench  # noqa: E402
from qrschnorr.codec import decode_proof_json, encode_proof_json, qr_decode, qr_encode  # noqa: E402
from qrschnorr.group import mod_exp  # noqa: E402
from qrschnorr.identity import KeyRegistry, keygen  # noqa: E402
from qrschnorr.protocol import FreshnessPolicy, NonceStore, prove, respond, verify  # noqa: E402

SEED = 20240601
_bench_cache = {}


def _bench():
    if "report" not in _bench_cache:
        _bench_cache["report"] = run_bench(P256, 50, rng=random.Random(SEED))
    return _bench_cache["report"]


def criterion_completeness():
    rng = random.Random(SEED + 1)
    kp = keygen(P256, rng)
    reg = KeyRegistry()
    reg.register("alice", kp.y, kp.params_digest)
    store = NonceStore()
    start = time.perf_counter()
    rejects = 0
    for _ in range(1000):
        proof = prove(P256, kp, rng=rng, key_id="alice")
        rejects += not verify(P256, reg, proof, store=store)
    elapsed = time.perf_counter() - start
    return rejects == 0 and elapsed < 10, f"1000 rounds, {rejects} rejections, {elapsed:.2f} s"


def criterion_verify_latency():
    median = statistics.median(_bench().verify_times)
    return median < 0.005, f"median verify {median * 1e3:.3f} ms over 50 iterations (limit 5 ms)"


def criterion_prove_latency():
    median = statistics.median(_bench().gen_times)
    return median < 0.005, f"median prove {median * 1e3:.3f} ms over 50 iterations (limit 5 ms)"


def criterion_size():
    rng = random.Random(SEED + 3)
    kp = keygen(P256, rng)
    docs = [encode_proof_json(prove(P256, kp, rng=rng, key_id="alice"), 256) for _ in range(50)]
    sizes = [len(d) for d in docs]
    versions = {qr_encode(d, "M").version for d in docs}
    variance = statistics.pvariance(sizes)
    ok = variance == 0 and max(sizes) <= 600 and max(versions) <= 20
    return ok, f"{sizes[0]} bytes, variance {variance}, QR version {sorted(versions)} at M"


def criterion_replay():
    policy = FreshnessPolicy()
    replay = simulate_replay(P256, policy=policy, trials=1000, seed=SEED + 4)
    stale = simulate_replay(P256, policy=policy, trials=1000, delay_seconds=policy.delta_seconds + 1,
                            seed=SEED + 5)
    ok = replay.reasons == {"replayed_nonce": 1000} and stale.reasons == {"stale_timestamp": 1000}
    return ok, f"replay {dict(replay.reasons)}, aged {dict(stale.reasons)}"


def criterion_tamper():
    outcomes = simulate_tamper(P256, trials=1000, seed=SEED + 6)
    accepts = {s.value: o.accepts for s, o in outcomes.items()}
    ok = set(outcomes) == set(TAMPER_SCENARIOS) and all(o.trials == 1000 for o in outcomes.values())
    return ok and sum(accepts.values()) == 0, f"accepts per field {accepts}"


def criterion_forgery():
    outcome = simulate_random_forgery(TOY, 100_000, reduced=True, seed=SEED + 7)
    expected = expected_forgery_rate(TOY)
    ratio = outcome.accept_rate / expected
    ok = 0.5 <= ratio <= 2
    return ok, f"p=23 rate {outcome.accept_rate:.5f} vs 1/22={expected:.5f} (ratio {ratio:.3f})"


def criterion_brute_force():
    p, g, n = TOY.p, TOY.g, TOY.order
    start = time.perf_counter()
    g_pow = [mod_exp(g, s, p) for s in range(n)]
    bad = cases = 0
    for x in range(n):
        y = mod_exp(g, x, p)
        for r in range(n):
            t = mod_exp(g, r, p)
            for c in range(n):
                honest = respond(r, c, x, TOY)
                rhs = t * mod_exp(y, c, p) % p
                holding = [s for s in range(n) if g_pow[s] == rhs]
                bad += holding != [honest]
                cases += 1
    elapsed = time.perf_counter() - start
    return bad == 0 and elapsed < 1, f"{cases} cases, {bad} mismatches, {elapsed:.3f} s"


def criterion_channel():
    rng = random.Random(SEED + 9)
    failures = 0
    for i in range(100):
        kp = keygen(P256, rng)
        proof = prove(P256, kp, rng=rng, key_id=f"user{i}")
        doc = encode_proof_json(proof, 256)
        scanned = qr_decode(qr_encode(doc).to_png())
        failures += scanned != doc or decode_proof_json(scanned, 256) != proof
    return failures == 0, f"100 proofs through JSON, QR, PNG and back, {failures} mismatches"


CRITERIA = [
    (1, "Completeness", criterion_completeness),
    (2, "Verification latency", criterion_verify_latency),
    (3, "Generation latency", criterion_prove_latency),
    (4, "Proof-size constancy", criterion_size),
    (5, "Replay rejection", criterion_replay),
    (6, "Tamper rejection", criterion_tamper),
    (7, "Desk-scale soundness", criterion_forgery),
    (8, "Algebraic brute force", criterion_brute_force),
    (9, "Channel round trip", criterion_channel),
]


def evaluate(number, name, fn):
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] {number} {name}: {detail}"
    ACCEPTANCE_LINES.append((number, line))
    return ok, line


@pytest.mark.parametrize("number,name,fn", CRITERIA, ids=[f"{n}-{name}" for n, name, _ in CRITERIA])
def test_criterion(number, name, fn):
    ok, line = evaluate(number, name, fn)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
