# %% [markdown]
# # Checking the integrators

# %%
import math

import numpy as np

from siruv import SolverConfig, SystemState, TABLE1, integrate, make_rhs

errors = [abs(integrate(lambda t, y: -y, 1.0, SolverConfig(dt=dt, t_end=1.0)).final - math.exp(-1))
          for dt in (0.2, 0.1, 0.05, 0.025)]
print("observed orders:", np.log2(np.array(errors[:-1]) / errors[1:]).round(3))

# %%
# self-convergence on the single-patch model: halving dt should cut the error 16x
rhs = make_rhs("single", [TABLE1])
y0 = np.asarray(SystemState.seeded(1))
ref = integrate(rhs, y0, SolverConfig(dt=0.001, t_end=365))
e = [np.abs(integrate(rhs, y0, SolverConfig(dt=dt, t_end=365)).states - ref.states).max() for dt in (0.1, 0.05)]
print("ratio:", e[0] / e[1])

# %%
adaptive = integrate(rhs, y0, SolverConfig(method="rkf45", dt=0.1, t_end=365, rel_tol=1e-6, abs_tol=1e-9))
print("RKF45 steps:", adaptive.stats, "max gap to reference:", np.abs(adaptive.states - ref.states).max())
