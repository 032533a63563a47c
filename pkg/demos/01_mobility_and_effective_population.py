# %% [markdown]
# # Residence-time matrices and effective population
#
# Row i of P says how a resident of patch i splits a day between patches.
# Column j weighted by the host populations gives the number of people
# physically present in patch j.

# %%
import numpy as np

from siruv import EQ1_MATRIX, effective_populations, validate_residence_matrix
from siruv.errors import RowSumViolation

print(EQ1_MATRIX.entries)

# %%
N = np.array([20000.0, 20000.0, 20000.0])
print("people present per patch:", effective_populations(EQ1_MATRIX, N))
# patch 2 is the commuter hub: 0.7 + 0.1 + 0.6 = 1.4 residents' worth of time

# %%
# eight hours a day in the neighbouring patch
P = validate_residence_matrix([[16 / 24, 8 / 24], [0.0, 1.0]])
print(effective_populations(P, [1000.0, 5000.0]))

# %%
try:
    validate_residence_matrix([[0.5, 0.6], [0.5, 0.5]])
except RowSumViolation as err:
    print("rejected:", err)
