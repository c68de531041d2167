"""Canonical JSON form of a proof.

Layout (no whitespace, this exact key order)::

    {"t":"<hex>","s":"<hex>","nonce":"<32 hex>","timestamp":<uint>,"key_id":"<str>"}

``t`` and ``s`` are lowercase hex zero-padded to two characters per byte of
the modulus, so every proof under one parameter set has the same length as
long as the timestamp digit count and key id match.
"""

from __future__ import annotations

import json
import re

from ..errors import ProofEncodingError, ProofParseError, ProofSchemaError
from ..protocol import NONCE_BYTES, Proof

FIELDS = ("t", "s", "nonce", "timestamp", "key_id")
_HEX = re.compile(r"[0-9a-f]+\Z")


def hex_width(bit_length: int) -> int:
    return 2 * ((bit_length + 7) // 8)


def encode_proof_json(proof: Proof, bit_length: int) -> bytes:
    width = hex_width(bit_length)
    if max(proof.t, proof.s).bit_length() > 4 * width:
        raise ValueError(f"t or s does not fit in {bit_length} bits")
    doc = {
        "t": format(proof.t, f"0{width}x"),
        "s": format(proof.s, f"0{width}x"),
        "nonce": proof.nonce.hex(),
        "timestamp": proof.timestamp,
        "key_id": proof.key_id,
    }
    return json.dumps(doc, separators=(",", ":")).encode("ascii")


class _Pairs(list):
    """Marks a parsed JSON object, keeping key order and duplicates."""


def decode_proof_json(data: bytes | str, bit_length: int | None = None) -> Proof:
    """Parse and validate a canonical proof document.

    Only the canonical byte form is accepted, so decoding then re-encoding
    always reproduces the input.  With ``bit_length`` the hex width of
    ``t`` and ``s`` is checked against it; otherwise they only have to agree.
    Range checks against ``p`` are left to the verifier.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        pairs = json.loads(data, object_pairs_hook=_Pairs)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ProofParseError(f"malformed proof document: {exc}") from None
    if not isinstance(pairs, _Pairs):
        raise ProofSchemaError("proof document must be a JSON object")

    keys = [k for k, _ in pairs]
    if sorted(keys) != sorted(FIELDS) or len(keys) != len(set(keys)):
        missing = set(FIELDS) - set(keys)
        extra = set(keys) - set(FIELDS)
        raise ProofSchemaError(f"bad field set (missing={sorted(missing)}, extra={sorted(extra)})")
    doc = dict(pairs)

    for name in ("t", "s", "nonce"):
        if not isinstance(doc[name], str) or not _HEX.match(doc[name]):
            raise ProofEncodingError(f"{name} must be a lowercase hex string")
    if not isinstance(doc["key_id"], str):
        raise ProofSchemaError("key_id must be a string")
    ts = doc["timestamp"]
    if type(ts) is not int or ts < 0:
        raise ProofSchemaError("timestamp must be a non-negative integer")

    if len(doc["nonce"]) != 2 * NONCE_BYTES:
        raise ProofEncodingError(f"nonce must be {2 * NONCE_BYTES} hex characters")
    width = len(doc["t"])
    if width % 2 or len(doc["s"]) != width:
        raise ProofEncodingError("t and s must share one even hex width")
    if bit_length is not None and width != hex_width(bit_length):
        raise ProofEncodingError(f"t and s must be {hex_width(bit_length)} hex characters")

    try:
        proof = Proof(
            t=int(doc["t"], 16),
            s=int(doc["s"], 16),
            nonce=bytes.fromhex(doc["nonce"]),
            timestamp=ts,
            key_id=doc["key_id"],
        )
    except ValueError as exc:
        raise ProofSchemaError(str(exc)) from None

    if encode_proof_json(proof, 4 * width) != data:
        raise ProofEncodingError("proof document is not in canonical form")
    return proof
