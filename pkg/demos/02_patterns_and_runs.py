#!/usr/bin/env python3
"""Pattern generation and run-length statistics.

PRBS7 exercises longer runs than an 8b/10b-style stream; the run-length
distribution is what couples pattern choice into the BER model.
"""

import numpy as np

from gocdr import Prbs7, RunDist, rll_stream, run_length_histogram

period = Prbs7().bits(127)
print("PRBS7 first period:", "".join(map(str, period[:32])), "...")
print(f"ones/zeros: {period.sum()}/{127 - period.sum()}")

rd = RunDist.prbs7()
print("\ncyclic run-length distribution of one PRBS7 period:")
for length in range(1, rd.l_max + 1):
    runs = rd.prob(length) * 64
    print(f"  L={length}: {rd.prob(length):.4f}  ({runs:.0f} of 64 runs)")

rng = np.random.default_rng(7)
bits = rll_stream(max_cid=5, p_extend=0.5, rng=rng, n_bits=1_000_000)
emp = run_length_histogram(bits)
model = RunDist.truncated_geometric(0.5, 5)
print("\nrun-length-limited stream (max 5 identical digits) vs closed form:")
for length in range(1, 6):
    print(f"  L={length}: empirical {emp.prob(length):.4f}  model {model.prob(length):.4f}")
print(f"mean run length: empirical {emp.mean_run_length():.4f}, "
      f"model {model.mean_run_length():.4f}")
print(f"PRBS7 mean run length: {rd.mean_run_length():.4f} "
      "(longer runs = more jitter accumulation between resyncs)")
