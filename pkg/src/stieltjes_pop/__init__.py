"""Monotone Stieltjes functionals and net reproduction rates of structured populations."""

from .grid_fn import (
    BVFn,
    Direction,
    DomainError,
    GridFn,
    Interval,
    MonotoneFn,
    TailSpec,
    classify_monotone,
    evaluate,
    total_variation,
)
from .stieltjes import (
    IntegralResult,
    QuadratureConfig,
    functional_F,
    functional_F0,
    functional_I,
    improper_stieltjes,
    integrate_by_parts_residual,
    stieltjes_integral,
)
from .monotone_props import (
    InstanceFamily,
    check_prop1,
    gen_G,
    gen_H,
    gen_pair_A,
    hm_evaluate,
    power_transform,
    run_property_suite,
)
from .population import (
    Density,
    EnvironmentKernel,
    Modulation,
    PopulationConfig,
    RateSpec,
    VitalRates,
    birth_functional_G,
    check_R_monotone,
    environment_E,
    monotone_mode,
    net_reproduction_R,
    solve_equilibrium,
    stationary_residual,
    survival_Pi,
    threshold_report,
)

__all__ = [
    "BVFn",
    "Direction",
    "DomainError",
    "GridFn",
    "Interval",
    "MonotoneFn",
    "TailSpec",
    "classify_monotone",
    "evaluate",
    "total_variation",
    "IntegralResult",
    "QuadratureConfig",
    "functional_F",
    "functional_F0",
    "functional_I",
    "improper_stieltjes",
    "integrate_by_parts_residual",
    "stieltjes_integral",
    "InstanceFamily",
    "check_prop1",
    "gen_G",
    "gen_H",
    "gen_pair_A",
    "hm_evaluate",
    "power_transform",
    "run_property_suite",
    "Density",
    "EnvironmentKernel",
    "Modulation",
    "PopulationConfig",
    "RateSpec",
    "VitalRates",
    "birth_functional_G",
    "check_R_monotone",
    "environment_E",
    "monotone_mode",
    "net_reproduction_R",
    "solve_equilibrium",
    "stationary_residual",
    "survival_Pi",
    "threshold_report",
]

__version__ = "0.1.0"
