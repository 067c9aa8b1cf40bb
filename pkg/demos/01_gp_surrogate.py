"""
Fitting the GP surrogate
========================

A squared-exponential GP whose hyperparameters are picked by grid search
over the log marginal likelihood. Inputs live in the unit cube; outputs
are standardized internally and forecasts come back in original units.
"""

import numpy as np

from calibo import Dataset, GaussianProcess, fit
from calibo.surrogate import LENGTHSCALE_GRID, NOISE_VARIANCE_GRID, SIGNAL_VARIANCE_GRID

rng = np.random.default_rng(0)

# eight noisy observations of a smooth function
X = rng.uniform(size=(8, 1))
y = np.sin(6 * X[:, 0]) + 0.05 * rng.normal(size=8)
data = Dataset(X, y)

# the grid: 24 lengthscales x 3 signal variances x 8 noise variances
print("grid sizes:", len(LENGTHSCALE_GRID), len(SIGNAL_VARIANCE_GRID), len(NOISE_VARIANCE_GRID))

model = fit(data)
print("selected kernel:", model.kernel)
print("log marginal likelihood:", round(model.log_marginal_likelihood(), 3))

# the likelihood surface itself, maximized over the signal variance
lml = GaussianProcess().grid_log_likelihood(data)
best_per_ell = lml.max(axis=(1, 2))
print("best lengthscale index:", int(np.argmax(best_per_ell)), "of", len(best_per_ell))

# forecasts: latent f by default, a new observation with noisy=True
xs = np.linspace(0, 1, 5)[:, None]
latent = model.predict(xs)
observed = model.predict(xs, noisy=True)
for x, m, s, so in zip(xs[:, 0], latent.mu, latent.sigma, observed.sigma):
    print(f"x={x:.2f}  mu={m:+.3f}  sigma_f={s:.4f}  sigma_y={so:.4f}")

# a scalar query gives a scalar forecast with cdf and quantile
f = model.predict([0.5])
print("P(y <= 0) at x=0.5:", round(float(f.cdf(0.0)), 4))
print("95% interval:", np.round(f.quantile(np.array([0.025, 0.975])), 3))
