"""
Plain and calibrated BO on the Forrester function
=================================================

Both loops share a seed, so they start from the same three points. The
calibrated loop refits a recalibrator from leave-one-out forecasts after
every model update.
"""

import numpy as np

from calibo import BoConfig, get_benchmark, run_calibrated, run_plain

bench = get_benchmark("forrester")
config = BoConfig(acquisition="ucb", budget=15, initial_points=3, seed=3)

plain = run_plain(bench, bench.space, config)
cal = run_calibrated(bench, bench.space, config)

print("known minimum:", round(bench.minimum, 4))
print("iter  plain_best  cal_best  plain_score  cal_score")
bp, bc = plain.best_by_iteration(), cal.best_by_iteration()
sp, sc = plain.score_by_iteration(), cal.score_by_iteration()
for t in range(0, config.budget + 1, 3):
    print(f"{t:4d}  {bp[t]:10.4f}  {bc[t]:8.4f}  {sp[t]:11.3f}  {sc[t]:9.3f}")

# what the calibrated loop learned at the last step
last = cal.records[-1]
print("last recalibrator:", last.recalibrator.mode, "with", len(last.recalibrator.knots), "knots")
print("queried x (calibrated):", np.round([r.x[0] for r in cal.records if r.iteration > 0], 3))
