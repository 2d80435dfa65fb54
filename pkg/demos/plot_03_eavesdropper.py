"""
Hiding the database from a wiretap
==================================

TESPIR with T=1, E=2 on four nodes: what a tapped node sees is the same
whatever the database holds.
"""

import numpy as np

from spir.adversary import AttackPlan, Strategy, tap
from spir.audit import audit_eavesdropper_privacy, tapped_table
from spir.schemes import Database, SchemeParams, decode, honest_round

params = SchemeParams.create("tespir", n=4, k=2, t=1, e=2, q=5)
rng = np.random.default_rng(1)
db = Database.random(params, rng)
round_ = honest_round(params, 1, db, rng)
view = tap(AttackPlan(Strategy.SILENT, taps={2, 4}), round_.queries, round_.answers, params)
for node, (query, answer) in view.entries.items():
    print(f"node {node}: query {query}  answer {answer}")
print("user decodes", decode(params, round_.answers).file, "== file 1", db.file(1))

# The exact law of one tapped node's view, for two very different databases.
zero = np.zeros(params.db_length, dtype=np.int64)
ones = np.ones(params.db_length, dtype=np.int64)
same = tapped_table(params, 1, (3,), zero) == tapped_table(params, 1, (3,), ones)
print("view law identical for W=0 and W=1:", same)

report = audit_eavesdropper_privacy(params, (2, 4), budget=10**8)
print("audit:", report.verdict.value, "method", report.method, "states", report.states_enumerated)
