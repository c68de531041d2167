# coding: utf-8

# # Parameters and keys
#
# Everything starts from a safe prime p = 2q + 1 and a generator g of the
# full multiplicative group mod p.  We look at the tiny textbook group first,
# then generate a 256-bit one.

# %%

import random

from qrschnorr import GroupParams, generate_params, keygen, validate_params
from qrschnorr.group import mod_exp

toy = GroupParams(p=23, g=5, bit_length=5)
print(validate_params(toy))

# The powers of 5 walk through every residue 1..22 before coming back to 1.

# %%

powers = [mod_exp(5, k, 23) for k in range(22)]
print(powers)
print(sorted(powers) == list(range(1, 23)))

# 2 is a quadratic residue mod 23, so it only reaches half of the group and
# fails validation.

# %%

print(validate_params(GroupParams(23, 2, 5)).failures)

# # A 256-bit group
#
# Fine for experiments, far too small for real deployments.

# %%

params = generate_params(256, random.Random(7))
print("p =", params.p)
print("g =", params.g)
print("digest", params.digest().hex())
print(params.to_json().decode())

# A key pair is a secret exponent x and the public y = g^x mod p.  The pair
# remembers which parameter set it belongs to.

# %%

kp = keygen(params, random.Random(8))
print(kp)  # the secret is not printed
print(kp.public().to_json().decode())
