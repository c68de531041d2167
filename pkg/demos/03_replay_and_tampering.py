# coding: utf-8

# # Replay and tampering
#
# A QR code can be photographed and shown again.  The verifier remembers
# nonces for a while and refuses timestamps outside a small window.  Here we
# run the attack harness against a 256-bit group.

# %%

import random

from qrschnorr import generate_params
from qrschnorr.attacksim import (
    simulate_future_stamp,
    simulate_replay,
    simulate_tamper,
)

params = generate_params(256, random.Random(3))

# Straight replay: the nonce store catches every copy.

# %%

print(simulate_replay(params, trials=500, seed=1).to_dict())

# Control run: wipe the verifier's memory between submissions and the copy
# goes through.  The nonce store, not the algebra, is what stops replay.

# %%

print(simulate_replay(params, trials=20, clear_store=True, seed=2).to_dict())

# Wait past the window and the timestamp check rejects the copy even
# without nonce memory.

# %%

print(simulate_replay(params, trials=200, delay_seconds=31, clear_store=True, seed=3).to_dict())
print(simulate_future_stamp(params, trials=200, seed=4).to_dict())

# Flip a bit in one field of an honest proof.  Shifting the timestamp by a
# second fails the equation because the timestamp is part of the challenge.

# %%

for scenario, outcome in simulate_tamper(params, trials=300, seed=5).items():
    print(scenario, outcome.accepts, dict(outcome.reasons))
