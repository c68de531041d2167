import json
import random

import pytest
from hypothesis import given, strategies as st

from _data import NOW
from qrschnorr.codec import decode_proof_json, encode_proof_json, hex_width
from qrschnorr.errors import ProofDecodeError, ProofEncodingError, ProofParseError, ProofSchemaError
from qrschnorr.protocol import Proof, prove

NONCE = bytes(range(16))
TOY_DOC = b'{"t":"0a","s":"05","nonce":"000102030405060708090a0b0c0d0e0f","timestamp":1700000000,"key_id":"alice"}'


def test_toy_document():
    proof = Proof(t=10, s=5, nonce=NONCE, timestamp=NOW, key_id="alice")
    assert encode_proof_json(proof, 5) == TOY_DOC
    assert decode_proof_json(TOY_DOC, 5) == proof
    assert decode_proof_json(TOY_DOC.decode()) == proof


def test_widths():
    assert hex_width(5) == 2
    assert hex_width(8) == 2
    assert hex_width(9) == 4
    assert hex_width(256) == 64


def test_fixed_length_at_256(params256, alice256, clock, rng):
    kp, _ = alice256
    sizes = {len(encode_proof_json(prove(params256, kp, clock, rng, key_id="alice"), 256)) for _ in range(200)}
    assert sizes == {226}


def test_small_values_are_padded(params256):
    doc = encode_proof_json(Proof(t=1, s=0, nonce=NONCE, timestamp=NOW, key_id="alice"), 256)
    parsed = json.loads(doc)
    assert parsed["t"] == "0" * 63 + "1"
    assert parsed["s"] == "0" * 64
    assert len(doc) == 226


def test_too_wide_for_bit_length():
    with pytest.raises(ValueError):
        encode_proof_json(Proof(t=256, s=0, nonce=NONCE, timestamp=0), 8)


@pytest.mark.parametrize("doc,error", [
    (TOY_DOC[:-1], ProofParseError),
    (TOY_DOC[:40], ProofParseError),
    (b"", ProofParseError),
    (b"\xff\xfe", ProofParseError),
    (b"[1,2]", ProofSchemaError),
    (b'"text"', ProofSchemaError),
    (TOY_DOC.replace(b"0e0f", b"0e"), ProofEncodingError),
    (TOY_DOC.replace(b"0e0f", b"0e0f00"), ProofEncodingError),
    (TOY_DOC.replace(b'"0a"', b'"0A"'), ProofEncodingError),
    (TOY_DOC.replace(b'"0a"', b'"a"'), ProofEncodingError),
    (TOY_DOC.replace(b'"0a"', b'"000a"'), ProofEncodingError),
    (TOY_DOC.replace(b'"0a"', b"10"), ProofEncodingError),
    (TOY_DOC.replace(b"1700000000", b"-1"), ProofSchemaError),
    (TOY_DOC.replace(b"1700000000", b"1.5"), ProofSchemaError),
    (TOY_DOC.replace(b"1700000000", b"true"), ProofSchemaError),
    (TOY_DOC.replace(b'"alice"', b"7"), ProofSchemaError),
    (TOY_DOC.replace(b',"key_id":"alice"', b""), ProofSchemaError),
    (TOY_DOC.replace(b"}", b',"extra":1}'), ProofSchemaError),
    (TOY_DOC.replace(b"}", b',"t":"0a"}'), ProofSchemaError),
])
def test_malformed(doc, error):
    with pytest.raises(error):
        decode_proof_json(doc)
    assert issubclass(error, ProofDecodeError)


@pytest.mark.parametrize("doc", [
    TOY_DOC.replace(b",", b", "),
    b" " + TOY_DOC,
    TOY_DOC + b"\n",
    json.dumps(json.loads(TOY_DOC), indent=1).encode(),
    json.dumps(dict(reversed(list(json.loads(TOY_DOC).items())))).encode(),
    TOY_DOC.replace(b"alice", b"\\u0061lice"),
])
def test_non_canonical_rejected(doc):
    with pytest.raises(ProofEncodingError):
        decode_proof_json(doc)


def test_width_checked_against_bits():
    decode_proof_json(TOY_DOC, 8)
    with pytest.raises(ProofEncodingError):
        decode_proof_json(TOY_DOC, 256)


def test_random_256_round_trip(params256, alice256, clock):
    kp, _ = alice256
    rng = random.Random(8)
    for _ in range(100):
        proof = prove(params256, kp, clock, rng, key_id="alice")
        doc = encode_proof_json(proof, 256)
        assert decode_proof_json(doc, 256) == proof
        assert encode_proof_json(decode_proof_json(doc, 256), 256) == doc


proofs = st.builds(
    Proof,
    t=st.integers(0, 2**256 - 1),
    s=st.integers(0, 2**256 - 1),
    nonce=st.binary(min_size=16, max_size=16),
    timestamp=st.integers(0, 2**63),
    key_id=st.text(max_size=64),
)


@given(proofs)
def test_round_trip_property(proof):
    doc = encode_proof_json(proof, 256)
    assert decode_proof_json(doc, 256) == proof
    assert encode_proof_json(decode_proof_json(doc), 256) == doc


@given(st.binary(max_size=300))
def test_arbitrary_bytes_never_crash(data):
    try:
        proof = decode_proof_json(data)
    except ProofDecodeError:
        return
    assert isinstance(proof, Proof)
