"""
Capacity and secrecy-rate table
===============================
"""

from spir.harness import capacity_csv, cli_capacity_table

rows = cli_capacity_table(["tbspir", "tespir", "tbespir"], range(4, 9), t_values=[1, 2],
                          b_values=[0, 1], e_values=[0, 2])
print(capacity_csv(r for r in rows if r.valid), end="")
print(sum(not r.valid for r in rows), "parameter tuples rejected")
