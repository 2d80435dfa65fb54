"""
Retrieval with a lying node
===========================

Five nodes, no collusion beyond a single node (T=1), one Byzantine node (B=1).
"""

import numpy as np

from spir.adversary import AttackPlan, Strategy, corrupt
from spir.schemes import Database, SchemeParams, capacity, decode, honest_round, secrecy_rate

params = SchemeParams.create("tbspir", n=5, k=2, t=1, b=1)
print(params, " L =", params.file_length, " M =", params.randomness_count)

rng = np.random.default_rng(7)
db = Database.random(params, rng)
print("files:\n", db.files)

# The user wants file 2.
round_ = honest_round(params, 2, db, rng)
print("queries (columns are nodes):\n", round_.queries.vectors)
print("honest answers:", round_.answers.a)

# Node 4 answers as if file 2 held something else.
plan = AttackPlan(Strategy.ALTFILE, targets={4})
received = corrupt(plan, round_.answers, round_, rng)
print("received:      ", received.a, " changed:", sorted(received.corrupted))

result = decode(params, received)
print("decoded file:", result.file, " flagged:", sorted(result.located_errors))
assert np.array_equal(result.file, db.file(2))

# One symbol per node is downloaded, so the rate is L/N.
print("rate", capacity(params), " common randomness per file symbol", secrecy_rate(params))
