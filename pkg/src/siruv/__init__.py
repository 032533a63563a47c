"""Multi-patch SIRUV models of host-vector transmission with commuting hosts."""

from .analysis import (
    compare_decoupled,
    decoupled_runs,
    decoupling_error,
    find_equilibrium,
    simulate,
)
from .core import (
    EQ1_MATRIX,
    TABLE1,
    PatchParams,
    PatchState,
    ResidenceMatrix,
    SystemState,
    effective_population,
    effective_populations,
    validate_residence_matrix,
)
from .integrate import Method, SolverConfig, Trajectory, check_conservation, integrate
from .io import ScenarioConfig, get_preset, parse_config, read_trajectory, write_config, write_trajectory
from .models import ModelKind, make_rhs, rhs_effective, rhs_legacy, rhs_single_patch

__version__ = "0.1.0"
