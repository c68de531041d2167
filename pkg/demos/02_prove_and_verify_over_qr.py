# coding: utf-8

# # Proving identity through a QR code
#
# The prover commits to t = g^r, hashes (t, y, nonce, timestamp) into a
# challenge c and answers with s = r + c*x mod (p-1).  The proof travels as a
# compact JSON document inside a QR symbol.

# %%

import random
from pathlib import Path
from tempfile import TemporaryDirectory

from qrschnorr import KeyRegistry, NonceStore, generate_params, keygen, prove, verify
from qrschnorr.codec import decode_proof_json, encode_proof_json, qr_decode, qr_encode

rng = random.Random(1)
params = generate_params(256, rng)
alice = keygen(params, rng)

registry = KeyRegistry()
registry.register("alice", alice.y, alice.params_digest)

# %%

proof = prove(params, alice, rng=rng, key_id="alice")
document = encode_proof_json(proof, params.bit_length)
print(document.decode())
print(len(document), "bytes")

# %%

symbol = qr_encode(document)
print("QR version", symbol.version, "level", symbol.error_correction)
print("\n".join(symbol.to_text(border=1).splitlines()[:6]))  # top rows only

# Write the PNG, read it back as a scanner would, and verify.

# %%

with TemporaryDirectory() as tmp:
    png = Path(tmp) / "proof.png"
    symbol.save_png(png)
    scanned = qr_decode(png)

print(scanned == document)
received = decode_proof_json(scanned, params.bit_length)
store = NonceStore()
print(verify(params, registry, received, store=store))

# Showing the same code a second time does not work.

# %%

print(verify(params, registry, received, store=store))
