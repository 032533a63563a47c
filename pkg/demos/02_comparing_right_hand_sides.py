# %% [markdown]
# # Legacy vs effective-population transmission terms
#
# With no commuting (P = I) the effective model collapses exactly to the
# single-patch system.  The legacy model does not: its vector-to-host and
# host-to-vector terms miss the M/N and N/M population ratios.

# %%
import numpy as np

from siruv import TABLE1, SystemState, rhs_effective, rhs_legacy, rhs_single_patch

params = [TABLE1] * 3
state = np.asarray(SystemState.seeded(3))
state[0, 4] = 0.02  # some infected mosquitoes in patch 0
I3 = np.eye(3)

np.set_printoptions(precision=3, linewidth=120)
print("legacy   :", rhs_legacy(state, params, I3)[0])
print("effective:", rhs_effective(state, params, I3)[0])
print("single   :", rhs_single_patch(state[0], TABLE1))

# %%
# M/N = 5 for the Table 1 populations, so the two models disagree by that factor
# in the rate at which infected mosquitoes infect people
S, V = state[0, 0], state[0, 4]
print("legacy vector->host:", TABLE1.alpha * V * S)
print("effective          :", TABLE1.alpha * TABLE1.vector_pop / TABLE1.host_pop * V * S)
