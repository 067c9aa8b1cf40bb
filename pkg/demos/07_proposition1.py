"""
Expectations under a quantile-calibrated model
==============================================

On a finite space, pooling P(Y|X) within groups of inputs gives a model Q
that is quantile-calibrated by construction. Its expectation of Y,
averaged over P(X), matches E_P[Y] exactly. A shifted model does not.
"""

import numpy as np

from calibo.calibration import make_discrete_problem, proposition1_check

for seed in range(5):
    lhs, rhs = proposition1_check(6, 8, seed)
    print(f"seed {seed}: E_P[Y]={lhs:.12f}  E_x E_Q[Y]={rhs:.12f}  diff={abs(lhs - rhs):.1e}")

prob = make_discrete_problem(6, 8, seed=0)
print("calibration violation of the pooled model:", prob.calibration_violation())

bad = type(prob)(prob.p_x, prob.p_y_given_x, np.roll(prob.p_y_given_x, 1, axis=1), prob.outcomes)
print("shifted model: violation", round(bad.calibration_violation(), 3),
      "expectation gap", round(abs(bad.expectation_true() - bad.expectation_model()), 3))
