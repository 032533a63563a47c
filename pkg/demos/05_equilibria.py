# %% [markdown]
# # Endemic equilibria
#
# Host turnover is slow (life expectancy 100 years), so trajectories circle the
# endemic state for centuries before settling.  find_equilibrium integrates
# with an adaptive solver until the derivative is below 1e-10.

# %%
import numpy as np

from siruv import EQ1_MATRIX, TABLE1, SystemState, find_equilibrium

eq = find_equilibrium("single", [TABLE1], None, SystemState.seeded(1))
print(f"single patch after {eq.t:.0f} days:", eq.state[0].round(6), f"residual {eq.residual:.1e}")

# %%
circulant = np.array([[0.6, 0.3, 0.1], [0.1, 0.6, 0.3], [0.3, 0.1, 0.6]])
for name, P in (("circulant", circulant), ("three-patch coupling", EQ1_MATRIX)):
    eq = find_equilibrium("effective", [TABLE1] * 3, P, SystemState.seeded(3))
    print(name, "spread of V across patches:", np.ptp(eq.state[:, 4]))
