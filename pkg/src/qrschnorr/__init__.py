"""QR-carried non-interactive Schnorr identification with replay protection."""

from .group import GroupParams, generate_params, is_probable_prime, mod_exp, validate_params
from .identity import KeyPair, KeyRegistry, PublicKey, keygen, lookup_key, register_key
from .protocol import (
    FreshnessPolicy,
    NonceStore,
    Proof,
    Reason,
    VerifyDecision,
    check_freshness,
    commit,
    derive_challenge,
    nonce_check_and_insert,
    prove,
    reduced_challenge,
    respond,
    verify,
)
from .codec import decode_proof_json, encode_proof_json, qr_decode, qr_encode, QrPayload

__version__ = "0.1.0"

__all__ = [
    "FreshnessPolicy",
    "GroupParams",
    "KeyPair",
    "KeyRegistry",
    "NonceStore",
    "Proof",
    "PublicKey",
    "QrPayload",
    "Reason",
    "VerifyDecision",
    "check_freshness",
    "commit",
    "decode_proof_json",
    "derive_challenge",
    "encode_proof_json",
    "generate_params",
    "is_probable_prime",
    "keygen",
    "lookup_key",
    "mod_exp",
    "nonce_check_and_insert",
    "prove",
    "qr_decode",
    "qr_encode",
    "reduced_challenge",
    "register_key",
    "respond",
    "validate_params",
    "verify",
]
