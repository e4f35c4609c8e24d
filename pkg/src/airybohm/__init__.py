"""Exact Bohmian trajectories of Airy wave packets in quadratic potentials.

The package computes particle trajectories of the accelerating Airy wave
packet in time-dependent quadratic potentials V(x, t) = m w^2(t) x^2 / 2
- F(t) x.  All potential dependence is carried by two classical auxiliary
functions: the packet center X(t) (a forced oscillator) and the scale
delta(t) (a Hill equation); trajectories then follow in closed form.  A
guidance-equation integrator and a split-step Schrodinger solver provide
independent verification routes, and a scenario-driven CLI writes
deterministic CSV artifacts.

Module map:

    specfun       Airy Ai and Ai' on the real line, double precision
    aux_odes      potentials, auxiliary ODEs, caustics, reparametrized time
    wavefunction  exact packet: density, phase gradient, complex psi
    trajectories  closed-form and integrated-guidance trajectory ensembles
    oracle_pde    split-step Fourier oracle and trajectory comparison
    cli           scenario files, artifacts, `airybohm` entry point
    errors        exception hierarchy
"""

from .aux_odes import (
    AuxSolution,
    PhysicalParams,
    PotentialSpec,
    hill_basis,
    nested_double_integral,
    reparametrized_time,
    second_solution,
    solve_delta,
    solve_X,
)
from .errors import (
    AiryBohmError,
    CausticDomainError,
    GridError,
    ScenarioError,
    StabilityError,
    TabulatedWindowError,
    ToleranceError,
    WindowError,
)
from .oracle_pde import (
    ComparisonReport,
    OracleConfig,
    WaveField,
    boundary_fraction,
    compare_with_analytic,
    evolve_split_step,
    initialize_packet,
    numeric_velocity,
)
from .specfun import AiryValue, airy_ai, airy_ai_arrays
from .trajectories import (
    TrajectoryEnsemble,
    TrajectoryMethod,
    build_ensemble,
    closed_form_trajectory,
    default_initial_positions,
    integrate_guidance,
    sample_initial_positions,
)
from .wavefunction import (
    WavePoint,
    airy_argument,
    complex_psi,
    density,
    velocity_field,
    wave_point,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # specfun
    "AiryValue",
    "airy_ai",
    "airy_ai_arrays",
    # aux_odes
    "PhysicalParams",
    "PotentialSpec",
    "AuxSolution",
    "solve_delta",
    "solve_X",
    "hill_basis",
    "reparametrized_time",
    "nested_double_integral",
    "second_solution",
    # wavefunction
    "WavePoint",
    "airy_argument",
    "density",
    "velocity_field",
    "complex_psi",
    "wave_point",
    # trajectories
    "TrajectoryMethod",
    "TrajectoryEnsemble",
    "closed_form_trajectory",
    "integrate_guidance",
    "build_ensemble",
    "default_initial_positions",
    "sample_initial_positions",
    # oracle_pde
    "WaveField",
    "OracleConfig",
    "ComparisonReport",
    "initialize_packet",
    "evolve_split_step",
    "numeric_velocity",
    "boundary_fraction",
    "compare_with_analytic",
    # errors
    "AiryBohmError",
    "CausticDomainError",
    "GridError",
    "ScenarioError",
    "StabilityError",
    "TabulatedWindowError",
    "ToleranceError",
    "WindowError",
]
