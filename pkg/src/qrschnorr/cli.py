"""Command-line front end.

Exit codes are a stable scripting contract:

    0  success / proof accepted
    1  proof rejected (``REJECT:<reason>`` on stdout)
    2  invalid arguments or unusable input files
    3  file I/O failure
    4  key generated for a different parameter set
    5  QR symbol or proof document could not be decoded
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import attacksim
from .bench import export_csv, export_json, run_bench
from .codec import DEFAULT_ERROR_CORRECTION, ERROR_LEVELS, decode_proof_json, encode_proof_json, qr_decode, qr_encode
from .errors import (
    KeyConflictError,
    ParameterError,
    ParamsMismatchError,
    ProofDecodeError,
    QrDecodeError,
    StorageError,
)
from .group import GroupParams, generate_params, validate_params
from .identity import KeyPair, KeyRegistry, PublicKey, atomic_write, check_key_id, keygen, save_private_key
from .protocol import DEFAULT_DELTA_SECONDS, FreshnessPolicy, NonceStore, prove, system_clock, verify

try:
    import fcntl
except ImportError:  # pragma: no cover - non-POSIX
    fcntl = None

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_MISMATCH = 4
EXIT_DECODE = 5

SECURE_MIN_BITS = 256
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class CliConfig:
    params_path: Path | None = None
    key_path: Path | None = None
    registry_path: Path | None = None
    output_path: Path | None = None
    delta_seconds: int = DEFAULT_DELTA_SECONDS
    bit_length: int | None = None
    insecure_small_params: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        return cls(
            params_path=args.params,
            key_path=getattr(args, "key", None),
            registry_path=getattr(args, "registry", None),
            output_path=getattr(args, "out", None),
            delta_seconds=args.delta,
            bit_length=getattr(args, "bits", None),
            insecure_small_params=args.insecure_small_params,
        )

    def check_bits(self, bit_length: int) -> None:
        if bit_length < SECURE_MIN_BITS and not self.insecure_small_params:
            raise CliError(
                f"{bit_length}-bit parameters are insecure; pass --insecure-small-params "
                "to use them for testing",
                EXIT_USAGE,
            )


def _read(path: Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None


def _load_params(cfg: CliConfig) -> GroupParams:
    if cfg.params_path is None:
        raise CliError("--params is required", EXIT_USAGE)
    try:
        params = GroupParams.from_json(_read(cfg.params_path))
    except ParameterError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    report = validate_params(params)
    if not report.ok:
        raise CliError(f"invalid parameters: {', '.join(report.failures)}", EXIT_USAGE)
    cfg.check_bits(params.bit_length)
    return params


@contextlib.contextmanager
def open_nonce_store(path: Path, policy: FreshnessPolicy):
    """File-backed nonce store, exclusively locked for the duration of the block."""
    path = Path(path)
    lock_path = path.with_name(path.name + ".lock")
    try:
        lock = open(lock_path, "a+b")
    except OSError as exc:
        raise StorageError(f"cannot lock {path}: {exc}") from exc
    with lock:
        if fcntl is not None:
            fcntl.flock(lock.fileno(), fcntl.LOCK_EX)
        store = NonceStore(policy)
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            raw = b"{}"
        except OSError as exc:
            raise StorageError(f"cannot read {path}: {exc}") from exc
        try:
            entries = json.loads(raw)
            for ts, nonce in sorted((int(ts), bytes.fromhex(n)) for n, ts in entries.items()):
                store.check_and_insert(nonce, ts)
        except (ValueError, TypeError, AttributeError) as exc:
            raise StorageError(f"corrupt nonce store {path}: {exc}") from None
        yield store
        doc = {nonce.hex(): ts for nonce, ts in sorted(store.seen.items())}
        atomic_write(path, json.dumps(doc, indent=1, sort_keys=True).encode() + b"\n")


def cmd_params(args, cfg: CliConfig) -> int:
    cfg.check_bits(args.bits)
    try:
        params = generate_params(args.bits)
    except ParameterError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    atomic_write(args.out, params.to_json())
    print(f"wrote {params.bit_length}-bit parameters to {args.out}")
    return EXIT_OK


def cmd_keygen(args, cfg: CliConfig) -> int:
    params = _load_params(cfg)
    keypair = keygen(params)
    save_private_key(keypair, args.out)
    if args.public_out:
        atomic_write(args.public_out, keypair.public().to_json())
    print(keypair.y)
    return EXIT_OK


def _load_public(path: Path, params: GroupParams) -> PublicKey:
    raw = _read(path)
    try:
        doc = json.loads(raw)
    except ValueError:
        raise CliError(f"{path} is not a key file", EXIT_USAGE) from None
    try:
        if isinstance(doc, dict) and "x" in doc:
            return KeyPair.from_json(raw, params).public()
        return PublicKey.from_json(raw)
    except ParamsMismatchError as exc:
        raise CliError(str(exc), EXIT_MISMATCH) from None
    except ParameterError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def cmd_register(args, cfg: CliConfig) -> int:
    params = _load_params(cfg)
    try:
        check_key_id(args.key_id)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    public = _load_public(args.key, params)
    if public.params_digest != params.digest():
        raise CliError("key was generated for a different parameter set", EXIT_MISMATCH)
    registry = KeyRegistry.load(args.registry)
    try:
        registry.register(args.key_id, public.y, public.params_digest)
    except KeyConflictError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    print(f"registered {args.key_id}")
    return EXIT_OK


def cmd_prove(args, cfg: CliConfig) -> int:
    params = _load_params(cfg)
    if not args.json_out and not args.png_out and not args.text:
        raise CliError("nothing to emit; give --json-out, --png-out or --text", EXIT_USAGE)
    try:
        keypair = KeyPair.from_json(_read(args.key), params)
    except ParamsMismatchError as exc:
        raise CliError(str(exc), EXIT_MISMATCH) from None
    except ParameterError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    try:
        check_key_id(args.key_id)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None

    clock = (lambda: args.now) if args.now is not None else system_clock
    proof = prove(params, keypair, clock, key_id=args.key_id)
    document = encode_proof_json(proof, params.bit_length)
    symbol = qr_encode(document, args.ec)
    png = symbol.to_png(scale=args.scale)
    written = []
    try:
        if args.json_out:
            atomic_write(args.json_out, document)
            written.append(args.json_out)
        if args.png_out:
            atomic_write(args.png_out, png)
            written.append(args.png_out)
    except StorageError:
        for path in written:
            with contextlib.suppress(OSError):
                os.unlink(path)
        raise
    if args.text:
        sys.stdout.write(symbol.to_text())
    print(f"proof {len(document)} bytes, QR version {symbol.version}-{symbol.error_correction}", file=sys.stderr)
    return EXIT_OK


def _read_proof(path: Path, params: GroupParams):
    raw = _read(path)
    if raw.startswith(PNG_MAGIC):
        try:
            raw = qr_decode(raw)
        except QrDecodeError as exc:
            raise CliError(f"cannot decode QR image: {exc}", EXIT_DECODE) from None
    try:
        return decode_proof_json(raw, params.bit_length)
    except ProofDecodeError as exc:
        raise CliError(f"cannot decode proof document: {exc}", EXIT_DECODE) from None


def cmd_verify(args, cfg: CliConfig) -> int:
    params = _load_params(cfg)
    if cfg.delta_seconds < 0:
        raise CliError("--delta must be non-negative", EXIT_USAGE)
    registry_path = Path(args.registry)
    if not registry_path.exists():
        raise CliError(f"registry not found: {registry_path}", EXIT_IO)
    registry = KeyRegistry.load(registry_path, missing_ok=False)
    proof = _read_proof(args.input, params)
    policy = FreshnessPolicy.with_delta(cfg.delta_seconds)
    clock = (lambda: args.now) if args.now is not None else system_clock
    store_path = args.nonce_store or registry_path.with_name(registry_path.name + ".nonces")
    with open_nonce_store(store_path, policy) as store:
        decision = verify(params, registry, proof, clock, policy, store)
    print(decision)
    return EXIT_OK if decision.accepted else EXIT_REJECT


def cmd_bench(args, cfg: CliConfig) -> int:
    if args.iterations < 1:
        raise CliError("-n/--iterations must be >= 1", EXIT_USAGE)
    params = _load_params(cfg)
    report = run_bench(params, args.iterations, include_warmup=args.include_warmup)
    if args.csv:
        export_csv(report, args.csv)
    if args.json:
        export_json(report, args.json)
    for name, stats in report.summary.items():
        print(f"{name}: min={stats['min']:.6g} median={stats['median']:.6g} max={stats['max']:.6g}")
    return EXIT_OK


ATTACK_CHOICES = [s.value for s in attacksim.Scenario] + ["tamper"]


def cmd_attack(args, cfg: CliConfig) -> int:
    if args.trials < 1:
        raise CliError("-n/--trials must be >= 1", EXIT_USAGE)
    params = _load_params(cfg)
    policy = FreshnessPolicy.with_delta(cfg.delta_seconds)
    scenario = args.scenario
    try:
        if scenario == "replay":
            outcomes = [attacksim.simulate_replay(params, None, policy, args.trials, seed=args.seed)]
        elif scenario == "stale_replay":
            outcomes = [attacksim.simulate_replay(
                params, None, policy, args.trials, delay_seconds=policy.delta_seconds + 1, seed=args.seed
            )]
        elif scenario == "future_stamp":
            outcomes = [attacksim.simulate_future_stamp(params, None, policy, args.trials, seed=args.seed)]
        elif scenario == "random_forgery":
            outcomes = [attacksim.simulate_random_forgery(
                params, args.trials, insecure=cfg.insecure_small_params, policy=policy, seed=args.seed
            )]
        else:
            chosen = attacksim.TAMPER_SCENARIOS if scenario == "tamper" else (scenario,)
            outcomes = list(attacksim.simulate_tamper(
                params, None, policy, args.trials, scenarios=chosen, seed=args.seed
            ).values())
    except (ValueError, ParameterError) as exc:
        raise CliError(str(exc), EXIT_USAGE) from None

    docs = [o.to_dict() for o in outcomes]
    text = json.dumps(docs[0] if len(docs) == 1 else docs, indent=2) + "\n"
    if args.report:
        atomic_write(args.report, text.encode())
    sys.stdout.write(text)
    return EXIT_OK


def _add_global_flags(parser: argparse.ArgumentParser, defaults: bool) -> None:
    # subcommands repeat the global flags with suppressed defaults so a value
    # given before the subcommand is not overwritten
    def default(value):
        return value if defaults else argparse.SUPPRESS

    parser.add_argument("--params", type=Path, default=default(None), help="parameter file")
    parser.add_argument("--delta", type=int, default=default(DEFAULT_DELTA_SECONDS),
                        help=f"timestamp tolerance in seconds (default {DEFAULT_DELTA_SECONDS})")
    parser.add_argument("--insecure-small-params", action="store_true", default=default(False),
                        help="allow parameters below 256 bits (testing only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrschnorr", description="QR-carried non-interactive Schnorr identification"
    )
    _add_global_flags(parser, defaults=True)
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, defaults=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", parents=[common], help="generate group parameters")
    p.add_argument("--bits", type=int, default=256)
    p.add_argument("-o", "--out", type=Path, required=True)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("keygen", parents=[common], help="generate a prover key pair")
    p.add_argument("-o", "--out", type=Path, required=True, help="private key file")
    p.add_argument("--public-out", type=Path, help="also write the public key file")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("register", parents=[common], help="add a public key to a registry")
    p.add_argument("--registry", type=Path, required=True)
    p.add_argument("--key-id", required=True)
    p.add_argument("--key", type=Path, required=True, help="public or private key file")
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("prove", parents=[common], help="produce a proof as JSON and QR")
    p.add_argument("--key", type=Path, required=True, help="private key file")
    p.add_argument("--key-id", required=True)
    p.add_argument("--json-out", type=Path)
    p.add_argument("--png-out", type=Path)
    p.add_argument("--text", action="store_true", help="print the QR as block art")
    p.add_argument("--ec", choices=ERROR_LEVELS, default=DEFAULT_ERROR_CORRECTION)
    p.add_argument("--scale", type=int, default=8, help="pixels per module")
    p.add_argument("--now", type=int, help="override the clock (Unix seconds)")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", parents=[common], help="verify a proof PNG or JSON file")
    p.add_argument("input", type=Path)
    p.add_argument("--registry", type=Path, required=True)
    p.add_argument("--nonce-store", type=Path,
                   help="seen-nonce file (default: <registry>.nonces)")
    p.add_argument("--now", type=int, help="override the clock (Unix seconds)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", parents=[common], help="time proof generation and verification")
    p.add_argument("-n", "--iterations", type=int, default=50)
    p.add_argument("--csv", type=Path)
    p.add_argument("--json", type=Path)
    p.add_argument("--include-warmup", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("attack", parents=[common], help="run an attack simulation")
    p.add_argument("--scenario", choices=ATTACK_CHOICES, required=True)
    p.add_argument("-n", "--trials", type=int, default=1000)
    p.add_argument("--report", type=Path)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_attack)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    cfg = CliConfig.from_args(args)
    try:
        return args.func(args, cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except StorageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
