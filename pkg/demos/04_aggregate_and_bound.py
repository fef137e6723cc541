# Sum over r, t of the weighted sums, its n = 1 lower bound, and the closing chain.
import sys

from siegel_gap.characters import character
from siegel_gap.reports import to_csv
from siegel_gap.theorem_pipeline import (AGGREGATE_CSV_COLUMNS, aggregate_row, aggregated_sum, bound_report,
                                         fit_c1)

#cell 1
runs = [aggregated_sum(character(d), 0.9, R, y) for d in (5, -4, 8) for R in (10, 35) for y in (2.0, 1e3, 1e4)]
sys.stdout.write(to_csv([aggregate_row(a) for a in runs], AGGREGATE_CSV_COLUMNS, precision=10))

#cell 2
# lhs >= lower bound term by term; the gap to the main-term prediction is the finite-y correction
print(all(a.lhs >= a.lower_bound for a in runs), min(float(a.min_term) for a in runs) >= 0)

#cell 3
# an exploratory c1 fitted from these runs, and the chain it implies
c1 = fit_c1(runs)
for q in (10**3, 10**6, 10**12):
    for c in (3.0, c1):
        b = bound_report(q, c)
        print(f"q={q:.0e} c1={c:.4f}  log R={b.log_R:8.2f}  chain={b.chain_lhs:.6f}  c={b.c:.5f}  "
              f"beta <= {b.beta_bound:.8f}")
