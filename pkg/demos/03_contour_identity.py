# The smoothed sum over n <= y, rebuilt from the pole at w = 1 - beta, the pole at
# w = 0 and a vertical-line integral on Re w = 3/4 - beta.
import time

from siegel_gap.characters import character
from siegel_gap.theorem_pipeline import WeightedSumSpec, contour_decomposition

cases = [(5, 0.9, 1, 1, 1e3), (5, 0.875, 5, 7, 1e3), (-4, 0.95, 5, 5, 1e4)]

#cell 1
for d, beta, r, t, y in cases:
    t0 = time.perf_counter()
    dec = contour_decomposition(WeightedSumSpec(character(d), beta, y, r, t))
    print(f"d={d} beta={beta} r={r} t={t} y={y:g}   ({time.perf_counter() - t0:.1f}s)")
    print(f"  direct        {float(dec.direct_sum):.12f}")
    print(f"  main term     {float(dec.main_term):.12f}")
    print(f"  w=0 residue   {float(dec.zero_residue):.12f}   (L(beta) = {float(dec.L_at_beta):.6f})")
    print(f"  remainder     {dec.remainder_integral:.12f}   V = {dec.V:g}")
    print(f"  defect {dec.identity_defect:.2e}  budget {dec.error_budget:.2e}  -> {dec.verdict}")

#cell 2
# beta is not a zero of L here, so the w = 0 residue is far from negligible;
# with r = 5, t = 7 and d = 5 neither prime splits and the main term stays on
