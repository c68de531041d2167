# coding: utf-8

# # How often does a random guess pass?
#
# In a toy group the odds are visible.  With the challenge reduced mod p-1,
# every (t, c) has exactly one accepting s, so a forger who picks s at
# random wins with probability 1/(p-1).

# %%

import random

import numpy as np

from qrschnorr import GroupParams, generate_params
from qrschnorr.attacksim import expected_forgery_rate, simulate_random_forgery

for p, g in ((23, 5), (47, 5)):
    params = GroupParams(p, g, p.bit_length())
    outcome = simulate_random_forgery(params, 100_000, seed=p)
    print(f"p={p}: observed {outcome.accept_rate:.4f}  expected {expected_forgery_rate(params):.4f}")

# Check the unique-s claim directly on p=23: for every (t, c, y) count the
# exponents s that satisfy g^s = t*y^c.

# %%

p, g = 23, 5
powers = np.array([pow(g, s, p) for s in range(p - 1)])
counts = np.zeros((p - 1, p - 1, p - 1), dtype=int)
for r in range(p - 1):
    t = pow(g, r, p)
    for x in range(p - 1):
        y = pow(g, x, p)
        for c in range(p - 1):
            counts[r, x, c] = np.count_nonzero(powers == t * pow(y, c, p) % p)
print(np.unique(counts))

# At 256 bits the same experiment never succeeds.  It has to be unlocked
# explicitly because it is pointless on real groups.

# %%

big = generate_params(256, random.Random(9))
print(simulate_random_forgery(big, 10_000, insecure=True, seed=9).to_dict())
