# Real characters from fundamental discriminants, and the values of L(s, chi)
# that everything downstream leans on.
import math

import mpmath
import numpy as np

from siegel_gap.characters import character, enumerate_fundamental_discriminants
from siegel_gap.special_functions import dirichlet_L, find_real_zeros, lemma1_constant_scan, zeta

#cell 1
# every real primitive character with |d| <= 30
for d in enumerate_fundamental_discriminants(-30, 30):
    c = character(d)
    print(f"d={d:4d}  q={c.q:3d}  parity={c.parity:+d}  chi(1..12)={[c(n) for n in range(1, 13)]}")

#cell 2
# class number formula sanity check: L(1, chi_-4) = pi/4, L(1, chi_5) = 2 log(golden ratio)/sqrt 5
mpmath.mp.dps = 30
print(dirichlet_L(1, character(-4)).value, mpmath.pi / 4)
print(dirichlet_L(1, character(5)).value, 2 * mpmath.log((1 + mpmath.sqrt(5)) / 2) / mpmath.sqrt(5))

#cell 3
# zeta is negative on (0, 1); the error bound travels with the value
for s in (0.25, 0.5, 0.75, 0.9):
    r = zeta(s)
    print(f"zeta({s}) = {mpmath.nstr(r.value, 15)}  +/- {r.error_bound:.1e}  via {r.method}")

#cell 4
# no real zeros near 1 for small moduli (a certified sign scan)
for d in (-4, 5, -23, 12):
    scan = find_real_zeros(character(d), (0.6, 0.99), step=0.01)
    print(d, "zeros:", [z.beta for z in scan.zeros], " min |L| on grid:", f"{scan.min_abs_value:.3f}")

#cell 5
# growth on the line Re s = 3/4, normalised by (|t|+2)^(1/8) log(|t|+2)
rep = lemma1_constant_scan((-100, 100), 2001, chi=character(5))
print({k: round(v, 4) if isinstance(v, float) else v for k, v in rep.fitted.items()})
