"""Timing and size measurements for proof generation and verification."""

from __future__ import annotations

import csv
import io
import json
import os
import secrets
import statistics
import time
from dataclasses import dataclass, field

from .codec import encode_proof_json
from .group import GroupParams
from .identity import KeyRegistry, atomic_write, keygen
from .protocol import FreshnessPolicy, NonceStore, prove, system_clock, verify

CSV_HEADER = ("iteration", "gen_seconds", "verify_seconds", "proof_bytes")
BENCH_KEY_ID = "bench"


@dataclass
class BenchReport:
    bit_length: int
    iterations: int
    gen_times: list[float] = field(default_factory=list)
    verify_times: list[float] = field(default_factory=list)
    proof_sizes: list[int] = field(default_factory=list)

    @staticmethod
    def _summarize(series):
        return {"min": min(series), "median": statistics.median(series), "max": max(series)}

    @property
    def summary(self) -> dict:
        return {
            "gen_seconds": self._summarize(self.gen_times),
            "verify_seconds": self._summarize(self.verify_times),
            "proof_bytes": self._summarize(self.proof_sizes),
        }

    def to_dict(self) -> dict:
        return {
            "bit_length": self.bit_length,
            "iterations": self.iterations,
            "gen_times": self.gen_times,
            "verify_times": self.verify_times,
            "proof_sizes": self.proof_sizes,
            "summary": self.summary,
        }


def run_bench(
    params: GroupParams,
    iterations: int = 50,
    *,
    include_warmup: bool = False,
    rng=None,
    clock=system_clock,
) -> BenchReport:
    """Time ``iterations`` prove/verify rounds against one pre-generated key.

    Key generation happens before timing starts.  An untimed warm-up round
    runs first unless ``include_warmup`` is set, in which case the first
    round is timed and recorded like the others.  Each verify gets a fresh
    nonce store, so replay detection never cuts a measurement short.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    rng = rng or secrets.SystemRandom()
    keypair = keygen(params, rng)
    registry = KeyRegistry()
    registry.register(BENCH_KEY_ID, keypair.y, keypair.params_digest)
    policy = FreshnessPolicy()
    report = BenchReport(bit_length=params.bit_length, iterations=iterations)

    def one_round():
        t0 = time.perf_counter()
        proof = prove(params, keypair, clock, rng, key_id=BENCH_KEY_ID)
        t1 = time.perf_counter()
        store = NonceStore(policy)
        t2 = time.perf_counter()
        decision = verify(params, registry, proof, clock, policy, store)
        t3 = time.perf_counter()
        if not decision.accepted:
            raise RuntimeError(f"honest proof rejected during benchmark: {decision}")
        return t1 - t0, t3 - t2, len(encode_proof_json(proof, params.bit_length))

    if not include_warmup:
        one_round()
    for _ in range(iterations):
        gen, ver, size = one_round()
        report.gen_times.append(gen)
        report.verify_times.append(ver)
        report.proof_sizes.append(size)
    return report


def report_csv(report: BenchReport) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    rows = zip(report.gen_times, report.verify_times, report.proof_sizes)
    for i, (gen, ver, size) in enumerate(rows, start=1):
        writer.writerow((i, f"{gen:.9f}", f"{ver:.9f}", size))
    return buf.getvalue().encode()


def export_csv(report: BenchReport, path: str | os.PathLike) -> None:
    atomic_write(path, report_csv(report))


def export_json(report: BenchReport, path: str | os.PathLike) -> None:
    atomic_write(path, json.dumps(report.to_dict(), indent=2).encode() + b"\n")
