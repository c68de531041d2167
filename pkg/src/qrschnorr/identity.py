"""Prover key pairs and the verifier's registry of public keys."""

from __future__ import annotations

import json
import os
import secrets
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    EntropyError,
    KeyConflictError,
    KeyNotFoundError,
    ParameterError,
    ParamsMismatchError,
    StorageError,
)
from .group import GroupParams, mod_exp

MAX_KEY_ID_LENGTH = 64


@dataclass(frozen=True)
class KeyPair:
    x: int
    y: int
    params_digest: bytes

    def __repr__(self) -> str:
        # keep the secret out of logs and tracebacks
        return f"KeyPair(y={self.y}, params_digest={self.params_digest.hex()[:16]}...)"

    @classmethod
    def from_secret(cls, params: GroupParams, x: int) -> "KeyPair":
        return cls(x=x, y=mod_exp(params.g, x, params.p), params_digest=params.digest())

    def public(self) -> "PublicKey":
        return PublicKey(self.y, self.params_digest)

    def to_json(self) -> bytes:
        doc = {"x": str(self.x), "params_digest": self.params_digest.hex()}
        return json.dumps(doc, separators=(",", ":")).encode() + b"\n"

    @classmethod
    def from_json(cls, data: bytes | str, params: GroupParams) -> "KeyPair":
        """Load a private key file and recompute ``y`` under ``params``.

        A key file written for another parameter set raises
        ``ParamsMismatchError`` before any range check on ``x``.
        """
        try:
            doc = json.loads(data)
            x = int(doc["x"])
            digest = bytes.fromhex(doc["params_digest"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ParameterError(f"malformed key file: {exc}") from None
        if digest != params.digest():
            raise ParamsMismatchError("key file belongs to a different parameter set")
        if not 0 <= x < params.order:
            raise ParameterError("private key out of range for these parameters")
        return cls(x=x, y=mod_exp(params.g, x, params.p), params_digest=digest)


@dataclass(frozen=True)
class PublicKey:
    y: int
    params_digest: bytes

    def to_json(self) -> bytes:
        doc = {"y": str(self.y), "params_digest": self.params_digest.hex()}
        return json.dumps(doc, separators=(",", ":")).encode() + b"\n"

    @classmethod
    def from_json(cls, data: bytes | str) -> "PublicKey":
        try:
            doc = json.loads(data)
            return cls(int(doc["y"]), bytes.fromhex(doc["params_digest"]))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParameterError(f"malformed public key: {exc}") from None


def keygen(params: GroupParams, rng=None, *, x: int | None = None) -> KeyPair:
    """Draw a private key uniformly from ``[1, p-2]`` and derive ``y = g^x mod p``.

    ``x`` forces the secret and skips the range rule; it exists for tests.
    """
    if x is None:
        rng = rng or secrets.SystemRandom()
        try:
            x = rng.randrange(1, params.p - 1)
        except (OSError, NotImplementedError) as exc:
            raise EntropyError(f"random source failed: {exc}") from exc
    return KeyPair.from_secret(params, x)


def atomic_write(path: str | os.PathLike, data: bytes, mode: int | None = None) -> None:
    """Write ``data`` to a temp file beside ``path`` and rename it into place."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        if mode is not None:
            os.chmod(tmp, mode)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise StorageError(f"cannot write {path}: {exc}") from exc


def save_private_key(keypair: KeyPair, path: str | os.PathLike) -> None:
    atomic_write(path, keypair.to_json(), mode=0o600)


def check_key_id(key_id: str) -> None:
    if not isinstance(key_id, str) or not key_id:
        raise ValueError("key_id must be a non-empty string")
    if len(key_id) > MAX_KEY_ID_LENGTH:
        raise ValueError(f"key_id longer than {MAX_KEY_ID_LENGTH} characters")


class KeyRegistry:
    """Verifier-side map from key id to ``(y, params_digest)``.

    With a ``backing_path`` every successful registration is written to disk
    immediately.  Registration is an atomic check-and-insert.
    """

    def __init__(self, backing_path: str | os.PathLike | None = None):
        self.entries: dict[str, PublicKey] = {}
        self.backing_path = Path(backing_path) if backing_path is not None else None
        self._lock = threading.Lock()

    @classmethod
    def load(cls, path: str | os.PathLike, *, missing_ok: bool = True) -> "KeyRegistry":
        registry = cls(path)
        try:
            raw = Path(path).read_bytes()
        except FileNotFoundError:
            if missing_ok:
                return registry
            raise StorageError(f"registry file not found: {path}") from None
        except OSError as exc:
            raise StorageError(f"cannot read {path}: {exc}") from exc
        try:
            doc = json.loads(raw)
            for key_id, entry in doc.items():
                registry.entries[key_id] = PublicKey(
                    int(entry["y"]), bytes.fromhex(entry["params_digest"])
                )
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise StorageError(f"corrupt registry file {path}: {exc}") from None
        return registry

    def to_json(self) -> bytes:
        doc = {
            key_id: {"y": str(pk.y), "params_digest": pk.params_digest.hex()}
            for key_id, pk in sorted(self.entries.items())
        }
        return json.dumps(doc, indent=2, sort_keys=True).encode() + b"\n"

    def save(self, path: str | os.PathLike | None = None) -> None:
        target = path or self.backing_path
        if target is None:
            raise StorageError("registry has no backing path")
        atomic_write(target, self.to_json())

    def register(self, key_id: str, y: int, params_digest: bytes) -> None:
        check_key_id(key_id)
        with self._lock:
            if key_id in self.entries:
                raise KeyConflictError(f"key id {key_id!r} is already registered")
            self.entries[key_id] = PublicKey(y, bytes(params_digest))
            if self.backing_path is not None:
                try:
                    self.save()
                except StorageError:
                    del self.entries[key_id]
                    raise

    def lookup(self, key_id: str) -> PublicKey:
        try:
            return self.entries[key_id]
        except KeyError:
            raise KeyNotFoundError(f"unknown key id {key_id!r}") from None

    def __contains__(self, key_id: str) -> bool:
        return key_id in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def register_key(registry: KeyRegistry, key_id: str, y: int, params_digest: bytes) -> None:
    registry.register(key_id, y, params_digest)


def lookup_key(registry: KeyRegistry, key_id: str) -> tuple[int, bytes]:
    pk = registry.lookup(key_id)
    return pk.y, pk.params_digest
