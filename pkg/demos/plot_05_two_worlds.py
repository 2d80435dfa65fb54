"""
Why N > 2B is needed
====================

With B+1 forged answers, two databases holding different files can produce
the same received word, so no decoder can be right in both worlds.
"""

import numpy as np

from spir.adversary import confusing_pairs
from spir.schemes import Database, SchemeParams, decode, honest_round

params = SchemeParams.create("tbspir", n=4, k=2, t=1, b=1, q=5)

for seed in range(50):
    rng = np.random.default_rng(seed)
    db = Database.random(params, rng)
    round_ = honest_round(params, 1, db, rng)
    pair = next(confusing_pairs(params, round_.queries, db, round_.randomness), None)
    if pair is not None:
        break

print("true file", db.file(1), " alternative", pair.alt_file)
print("honest nodes", sorted(pair.honest))
print("world A (true file, forged", sorted(pair.forged_true), "):", pair.case_true.a)
print("world B (alt file,  forged", sorted(pair.forged_alt), "):", pair.case_alt.a)
print("decoder returns", decode(params, pair.case_true).file, "in both worlds")

# With only B forgeries no such pair exists.
print("pairs with B forgeries:",
      sum(1 for _ in confusing_pairs(params, round_.queries, db, round_.randomness, extra=0)))
