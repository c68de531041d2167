# coding: utf-8

# # Timing prove and verify
#
# Key generation is done up front; only the per-round work is timed.

# %%

import random
import statistics
from pathlib import Path
from tempfile import TemporaryDirectory

from qrschnorr import generate_params
from qrschnorr.bench import export_csv, run_bench

# 1024-bit safe primes can take a minute to find, so they are left out here
for bits in (256, 512):
    params = generate_params(bits, random.Random(bits))
    report = run_bench(params, 50)
    gen = statistics.median(report.gen_times) * 1e3
    ver = statistics.median(report.verify_times) * 1e3
    print(f"{bits:5d} bits  prove {gen:.3f} ms  verify {ver:.3f} ms  size {report.proof_sizes[0]} B")

# The CSV is what you would feed to a plotting tool.

# %%

with TemporaryDirectory() as tmp:
    path = Path(tmp) / "bench.csv"
    export_csv(report, path)
    print("\n".join(path.read_text().splitlines()[:4]))
