"""Pseudo-spectral simulator for the fractional dissipative Burgers equation.

The equation u_t + u u_x = -gamma * Lambda^alpha u is advanced on the
2*pi-periodic interval with spectral space derivatives and explicit RK4,
while a diagnostics engine tracks mass, L2/L-infinity/H^3 norms, the minimum
slope and its closed-form blow-up law, the integral of ||u_x||_inf, and a
spectral resolution monitor, all checkable against independent analytic
oracles.
"""

from .diagnostics import (
    BlowupReport,
    DetectionThresholds,
    DiagnosticsRecord,
    SingularTimeError,
    bkm_accumulate,
    check_blowup,
    extrema,
    l2_norm,
    mass,
    min_slope,
    observe,
    predicted_blowup_time,
    slope_closed_form,
    sobolev_norm,
    tail_fraction,
)
from .dynamics import (
    InstabilityError,
    InvalidStateError,
    SimParams,
    rhs,
    rk4_step,
    stable_dt,
)
from .oracles import (
    ConvergenceError,
    InitialCondition,
    characteristics_solution,
    linear_decay_solution,
    shock_time,
)
from .cli import (
    RunConfig,
    RunResult,
    UsageError,
    main,
    parse_config,
    run_simulation,
    write_outputs,
)
from .spectral import (
    GridSpec,
    NodalField,
    SpectralField,
    SymmetryError,
    dealias,
    forward_dft,
    fractional_laplacian,
    inverse_dft,
    make_grid,
    spectral_derivative,
)

__version__ = "0.1.0"

__all__ = [
    "BlowupReport", "ConvergenceError", "DetectionThresholds",
    "DiagnosticsRecord", "GridSpec", "InitialCondition", "InstabilityError",
    "InvalidStateError", "NodalField", "RunConfig", "RunResult", "SimParams",
    "SpectralField", "SingularTimeError", "SymmetryError", "UsageError",
    "bkm_accumulate", "characteristics_solution", "check_blowup", "dealias",
    "extrema", "forward_dft", "fractional_laplacian", "inverse_dft",
    "l2_norm", "linear_decay_solution", "main", "make_grid", "mass",
    "min_slope", "observe", "parse_config", "predicted_blowup_time", "rhs",
    "rk4_step", "run_simulation", "shock_time", "slope_closed_form",
    "sobolev_norm", "spectral_derivative", "stable_dt", "tail_fraction",
    "write_outputs",
]
