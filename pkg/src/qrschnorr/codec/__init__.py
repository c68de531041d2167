"""Proof serialization and the QR carrier."""

from .proofjson import FIELDS, decode_proof_json, encode_proof_json, hex_width
from .qr import (
    DEFAULT_ERROR_CORRECTION,
    ERROR_LEVELS,
    QUIET_ZONE,
    QrPayload,
    qr_decode,
    qr_encode,
)
from .qrread import byte_mode_capacity, read_matrix

__all__ = [
    "DEFAULT_ERROR_CORRECTION",
    "ERROR_LEVELS",
    "FIELDS",
    "QUIET_ZONE",
    "QrPayload",
    "byte_mode_capacity",
    "decode_proof_json",
    "encode_proof_json",
    "hex_width",
    "qr_decode",
    "qr_encode",
    "read_matrix",
]
