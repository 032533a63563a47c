# %% [markdown]
# # Switching commuting off
#
# With P = I every patch should behave like an isolated single patch.  The
# effective-population model does so to rounding error; the legacy model is
# off by more than 0.1 in the vector compartments.

# %%
import json

from siruv import SolverConfig, SystemState, TABLE1, compare_decoupled

report, effective, legacy = compare_decoupled([TABLE1] * 3, SystemState.seeded(3), SolverConfig(dt=0.05))
print(json.dumps(report["models"], indent=2))

# %%
# where the legacy model departs most
diff = abs(legacy.multi.states - legacy.reference.states)[:, 0, :]
k, c = divmod(int(diff.argmax()), 5)
print(f"largest gap {diff.max():.3f} in compartment {'SIRUV'[c]} at day {legacy.multi.times[k]:g}")
