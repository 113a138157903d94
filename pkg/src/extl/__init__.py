"""Extinction-time distributions for declining epidemics with
infection-age-dependent infectivity, with a matched Markov benchmark."""

from .characteristics import (
    EpidemicCharacteristics,
    NoFiniteRootError,
    calibrate_peak,
    compute_characteristics,
    decay_rate,
    divergence_boundary,
    effective_reproduction_number,
    match_markov,
    mean_laplace,
)
from .lln import SEIR, SIR, MacroState, Trajectory, integrate_compartmental, integrate_kermack
from .markov import sir_cdf, sir_mean, sir_pgf
from .mc import EmpiricalCdf, SimConfig, empirical_cdf, sample_extinction_times, simulate_extinction
from .profiles import (
    ConstantRate,
    Dirac,
    DurationLaw,
    Exponential,
    ExposedConstantRate,
    InfectivityLaw,
    ProfileDraw,
    TriangularRamp,
    Uniform,
    sample_profile,
    scale_law,
)
from .quadrature import QuadratureSpec
from .solver import (
    CdfGrid,
    MeanEstimate,
    eval_cdf,
    mean_from_cdf,
    power_cdf,
    solve_cdf,
    solve_tilted_cdf,
)

__version__ = "0.1.0"

__all__ = [
    "CdfGrid",
    "ConstantRate",
    "Dirac",
    "DurationLaw",
    "EmpiricalCdf",
    "EpidemicCharacteristics",
    "Exponential",
    "ExposedConstantRate",
    "InfectivityLaw",
    "MacroState",
    "MeanEstimate",
    "NoFiniteRootError",
    "ProfileDraw",
    "QuadratureSpec",
    "SEIR",
    "SIR",
    "SimConfig",
    "Trajectory",
    "TriangularRamp",
    "Uniform",
    "calibrate_peak",
    "compute_characteristics",
    "decay_rate",
    "divergence_boundary",
    "effective_reproduction_number",
    "empirical_cdf",
    "eval_cdf",
    "integrate_compartmental",
    "integrate_kermack",
    "match_markov",
    "mean_from_cdf",
    "mean_laplace",
    "power_cdf",
    "sample_extinction_times",
    "sample_profile",
    "scale_law",
    "simulate_extinction",
    "sir_cdf",
    "sir_mean",
    "sir_pgf",
    "solve_cdf",
    "solve_tilted_cdf",
]
