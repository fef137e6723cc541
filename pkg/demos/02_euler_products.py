# The correction products Q(w) and P_{r,t}(w), and which (r, t) survive at w = 1.
from fractions import Fraction

import numpy as np

from siegel_gap.arith import squarefree_coprime_to_6
from siegel_gap.characters import character
from siegel_gap.euler_products import (P_at_one_closed, P_at_one_displayed, P_eval, Q_accelerated, Q_eval,
                                       lemma6_double_sum, split_part)

chi = character(-4)

#cell 1
# truncated product against the accelerated one; the tail bound shrinks with P_max
for P in (10**3, 10**4):
    r = Q_eval(chi, 0.75 + 5j, P)
    print(P, r.value, f"tail <= {r.error_bound:.2e}")
print("accelerated", Q_accelerated(chi, 0.75 + 5j).value)

#cell 2
# P_{r,t}(1) is a rational number; only primes with chi(p) = 1 enter
rs = squarefree_coprime_to_6(40)
table = np.array([[float(P_eval(chi, r, t, 1)) for t in rs] for r in rs])
print("r, t =", rs)
print(table)

#cell 3
# pairs r != t with a nonzero value: their split parts coincide
for r in rs:
    for t in rs:
        v = P_eval(chi, r, t, 1)
        if r < t and v:
            print(f"P_({r},{t})(1) = {v}   split parts {split_part(r, chi)}, {split_part(t, chi)}"
                  f"   two-case form gives {P_at_one_displayed(r, t, chi)}")

#cell 4
# consequently the double sum is not its r = t diagonal
rep = lemma6_double_sum(100, chi)
m = rep.measured
print("full", float(m["full"]), " grouped", float(m["grouped"]), " diagonal", float(m["diagonal_r_eq_t"]))
