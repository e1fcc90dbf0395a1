"""Local and global estimation bounds for rotated spin-j state families.

The package computes symmetric and right logarithmic derivative bounds,
their D-invariant closed forms, and the exact optimum of covariant global
estimation for diagonal families (binomial, geometric, point mass) evolved
under two-axis rotations, plus a Monte Carlo simulator of the optimal
measurement and a sweep/CLI layer for producing comparison tables.
"""

__version__ = "0.1.0"

from .spin import (  # noqa: F401
    CouplingProjectors,
    SpinSystem,
    angular_momentum,
    casimir,
    coherent_top_amplitudes,
    coupling_projectors,
    exp_i_hermitian,
    ladder_plus,
)
from .states import (  # noqa: F401
    DensityState,
    ParamPoint,
    WeightDistribution,
    binomial_weights,
    bloch_point,
    custom_weights,
    delta_weights,
    diagonal_state,
    error_function_point,
    evolved_state,
    fidelity_point,
    geometric_weights,
    param_from_bloch,
)
from .local_bounds import (  # noqa: F401
    BoundsReport,
    ComputationError,
    FisherMatrices,
    ModelPoint,
    bounds_report,
    commutation_superoperator,
    d_invariance,
    d_matrix,
    diagonal_model_fisher,
    holevo_upper_bound,
    rld_bound,
    rld_fisher,
    rld_solve,
    sld_bound,
    sld_fisher,
    sld_solve,
    unitary_model,
)
from .global_bounds import (  # noqa: F401
    ConditionNotMet,
    GlobalReport,
    binomial_r_max,
    delta_r_max,
    geometric_error_expansion,
    geometric_r_max,
    global_error,
    global_report,
    max_average_fidelity,
    sector_condition_holds,
    sector_overlaps,
)
from .classical import (  # noqa: F401
    binomial_estimator_moments,
    binomial_mse,
    expectation_parameter,
    geometric_moments,
    geometric_pmf,
    natural_fisher,
)
from .simulate import (  # noqa: F401
    SimConfig,
    SimResult,
    average_fidelity,
    fibonacci_sphere_grid,
    sample_outcome,
    worst_case_scan,
)
from .sweep import SweepRow, SweepSpec, run_sweep  # noqa: F401
