"""
Prime fields and GRS codes
==========================

Arithmetic in F_7, a Vandermonde generator and one corrected error.
"""

import numpy as np

from spir.codes import GrsSpec, encode, grs_generator, rs_decode
from spir.gf import PrimeField, default_locators

f = PrimeField(7)
print("3 + 5 =", f.add(3, 5), "  3^-1 =", f.inv(3), "  2^10 =", f.pow(2, 10))

# One locator per node: 1, 2, 3, 4.
loc = default_locators(f, 4)
spec = GrsSpec(loc, 2)
print("generator:\n", grs_generator(spec).data)

# Encode (5, 1) and hit node 3 with an error.
codeword = encode([5, 1], spec)
received = codeword.copy()
received[2] = (received[2] + 4) % 7
out = rs_decode(received, spec, max_errors=1)
print("sent", codeword, "received", received)
print("decoded", out.message, "error at node", sorted(i + 1 for i in out.error_positions))
assert np.array_equal(out.message, [5, 1])
