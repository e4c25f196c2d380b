import logging

from fracab.ab2_schemes import (
    abc_weights,
    bootstrap,
    caputo_weights,
    cf_weights,
    integrate,
    iter_states,
    step,
)
from fracab.error_analysis import (
    caputo_remainder_bound,
    cf_remainder_bound,
    max_error,
    observed_order,
    stability_gap,
)
from fracab.errors import (
    DomainError,
    Error,
    InstabilityDetected,
    InvalidRunSpec,
    NonConvergence,
    OverflowSignal,
)
from fracab.fisher_pde import (
    exact_neumann,
    exact_solution,
    forcing,
    laplacian_neumann,
    solve_fisher,
)
from fracab.operators import (
    caputo_derivative_power,
    fractional_derivative_of_exact_solution,
    kernel_weighted_integral,
    rl_integral_power,
)
from fracab.oracles import abc_reference, caputo_reference, cf_reference, classical_ab2
from fracab.schema import (
    DerivativeKind,
    ErrorReport,
    FisherConfig,
    ForcingMode,
    Monomial,
    NeumannSide,
    NormalizationVariant,
    Problem,
    ReferenceConfig,
    RunSpec,
    SeedMode,
    StepperState,
    StepWeights,
    Trajectory,
)
from fracab.special_functions import gamma, mittag_leffler, normalization
from fracab.version import __version__  # noqa

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "DerivativeKind",
    "DomainError",
    "Error",
    "ErrorReport",
    "FisherConfig",
    "ForcingMode",
    "InstabilityDetected",
    "InvalidRunSpec",
    "Monomial",
    "NeumannSide",
    "NonConvergence",
    "NormalizationVariant",
    "OverflowSignal",
    "Problem",
    "ReferenceConfig",
    "RunSpec",
    "SeedMode",
    "StepWeights",
    "StepperState",
    "Trajectory",
    "abc_reference",
    "abc_weights",
    "bootstrap",
    "caputo_derivative_power",
    "caputo_reference",
    "caputo_remainder_bound",
    "caputo_weights",
    "cf_reference",
    "cf_remainder_bound",
    "cf_weights",
    "classical_ab2",
    "exact_neumann",
    "exact_solution",
    "forcing",
    "fractional_derivative_of_exact_solution",
    "gamma",
    "integrate",
    "iter_states",
    "kernel_weighted_integral",
    "laplacian_neumann",
    "max_error",
    "mittag_leffler",
    "normalization",
    "observed_order",
    "rl_integral_power",
    "solve_fisher",
    "stability_gap",
    "step",
]
