"""
Acquisition functions on plain and recalibrated forecasts
=========================================================

PI, EI and the confidence bound all work on any forecast with a cdf and
a quantile. For minimization the bound is the lower quantile at 1 - alpha
and the optimizer maximizes its negative.
"""

import numpy as np

from calibo import AcquisitionSpec, GaussianForecast, Recalibrator, acquisition_value, apply_recalibrator
from calibo.acquisition import expected_improvement, quantile_grid_ei

f = GaussianForecast(np.array([0.0, 0.5, 1.0]), np.array([1.0, 0.2, 2.0]))
incumbent = 0.3

for kind in ("pi", "ei", "ucb"):
    spec = AcquisitionSpec(kind, incumbent=incumbent, epsilon=0.01)
    print(f"{kind:>3}:", np.round(acquisition_value(f, spec), 4))

# a monotone map that widens the lower tail
r = Recalibrator("monotone-map", knots=((0, 0), (0.2, 0.35), (0.8, 0.85), (1, 1)))
g = apply_recalibrator(r, f)
spec = AcquisitionSpec("ei", incumbent=incumbent)
print("EI after recalibration:", np.round(expected_improvement(g, spec), 4))
print("512-point quantile grid:", np.round(quantile_grid_ei(g, incumbent), 4))

# Monte Carlo check of the first entry
rng = np.random.default_rng(0)
draws = g[0].quantile(rng.uniform(size=200_000))
print("Monte Carlo:", round(float(np.mean(np.maximum(incumbent - draws, 0))), 4))

# sigma rescaling keeps forecasts Gaussian and stretches the interval
wide = apply_recalibrator(Recalibrator("sigma-rescale", scale=2.0), f)
print("95% width before/after:", np.round(f.quantile(0.975) - f.quantile(0.025), 3), np.round(wide.quantile(0.975) - wide.quantile(0.025), 3))
