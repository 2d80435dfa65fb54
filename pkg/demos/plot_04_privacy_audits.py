"""
Exact privacy audits
====================

All three audits on a small TBESPIR instance, then on a deliberately
broken variant that forgets the common-randomness mask.
"""

from spir.audit import BROKEN_MODELS, audit_all, replay_witness
from spir.schemes import SchemeParams

params = SchemeParams.create("tbespir", n=4, k=2, t=1, b=1, e=1, q=5)
for r in audit_all(params, budget=10**7):
    print(f"{r.constraint.value:13s} subset={r.subset} k={r.k} -> {r.verdict.value}")

broken = BROKEN_MODELS["unmasked"]
for r in audit_all(params, budget=10**7, model=broken):
    if r.witness is not None:
        w = r.witness
        print(f"\n{r.constraint.value} FAILS without masks:")
        print("  ", w.condition_a, "->", w.outcome_a, "x", w.count_a)
        print("  ", w.condition_b, "->", w.outcome_b, "x", w.count_b)
        print("   replayed counts:", replay_witness(params, r, broken))
        break
