"""Semi-discrete tendency and explicit fourth-order Runge-Kutta stepping.

The evolved equation is

    u_t + u u_x = -gamma * Lambda^alpha u

on the periodic interval, discretized pseudo-spectrally: derivatives and the
fractional laplacian are multipliers in coefficient space, the quadratic
term is the plain nodal (collocation) product u * (D_N u). The conservative
form -0.5*(u^2)_x is deliberately not used; instead the zero mode of the
product's transform is zeroed outright, which keeps the tendency mass-neutral
by construction (analytically that coefficient is the integral of a perfect
derivative and vanishes anyway).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    DEALIAS_RULES,
    GridSpec,
    NodalField,
    SymmetryError,
    dealias,
    forward_dft,
    fractional_laplacian,
    inverse_dft,
    spectral_derivative,
    validate_alpha,
)

# CFL-style safety factors and divide-by-zero guard for stable_dt.
CFL_ADVECTION = 0.5
CFL_DISSIPATION = 0.5
DT_GUARD = 1e-12


class InvalidStateError(ValueError):
    """The field handed to the tendency contains NaN or Inf."""


class InstabilityError(RuntimeError):
    """A Runge-Kutta stage went non-finite; carries the stage index (1..4)."""

    def __init__(self, stage: int, time: float):
        self.stage = stage
        self.time = time
        super().__init__(
            f"non-finite values in Runge-Kutta stage {stage} near t={time:.6g}; "
            "the step is unstable or the solution is blowing up"
        )


@dataclass(frozen=True)
class SimParams:
    """Physical and stepping parameters for one run.

    dt is either a positive step size or the string "auto", in which case the
    run loop calls stable_dt before every step. linear_only drops the
    quadratic term (test mode); nonlinear_only forces the gamma pathway to 0.
    """

    gamma: float = 0.0
    alpha: float = 1.0
    dt: float | str = "auto"
    t_final: float = 1.0
    dealias_rule: str = "off"
    linear_only: bool = False
    nonlinear_only: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "alpha", validate_alpha(self.alpha))
        object.__setattr__(self, "t_final", float(self.t_final))
        if self.gamma < 0.0 or not np.isfinite(self.gamma):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma!r}")
        if self.t_final <= 0.0 or not np.isfinite(self.t_final):
            raise ValueError(f"t_final must be finite and > 0, got {self.t_final!r}")
        if self.dt != "auto":
            dt = float(self.dt)
            if dt <= 0.0 or not np.isfinite(dt):
                raise ValueError(f'dt must be > 0 or "auto", got {self.dt!r}')
            object.__setattr__(self, "dt", dt)
        if self.dealias_rule not in DEALIAS_RULES:
            raise ValueError(
                f"unknown dealias rule {self.dealias_rule!r}, expected one of {DEALIAS_RULES}"
            )
        if self.linear_only and self.nonlinear_only:
            raise ValueError("linear_only and nonlinear_only cannot both be set")

    @property
    def effective_gamma(self) -> float:
        # nonlinear_only studies pure steepening: the dissipation pathway is off.
        return 0.0 if self.nonlinear_only else self.gamma


def rhs(u: NodalField, g: GridSpec, p: SimParams) -> NodalField:
    """Tendency F(u) = -u*(D_N u) - gamma*Lambda^alpha u, pseudo-spectrally.

    The product is optionally dealiased per p.dealias_rule and its zero mode
    is removed before returning to nodal space, so the transform of the
    tendency carries an exactly zero mean coefficient.
    """
    if len(u.values) != g.n:
        raise ValueError(f"field length {len(u.values)} does not match grid n={g.n}")
    if not np.all(np.isfinite(u.values)):
        raise InvalidStateError(f"non-finite field handed to rhs at t={u.time:.6g}")

    # Finiteness is checked explicitly before and after each stage, so the
    # hardware overflow/invalid flags raised while a field diverges are noise.
    with np.errstate(over="ignore", invalid="ignore"):
        s = forward_dft(u, g)
        tendency = np.zeros(g.n)
        if not p.linear_only:
            ux = inverse_dft(spectral_derivative(s), g, u.time).values
            prod = forward_dft(NodalField(u.values * ux, u.time), g)
            prod = dealias(prod, p.dealias_rule)
            prod.coeffs[g.n // 2] = 0.0  # k = 0 entry: mass-neutral by construction
            tendency -= inverse_dft(prod, g, u.time).values
        if p.effective_gamma > 0.0:
            diss = inverse_dft(fractional_laplacian(s, p.alpha), g, u.time).values
            tendency -= p.effective_gamma * diss
    return NodalField(tendency, u.time)


def rk4_step(u: NodalField, g: GridSpec, p: SimParams, dt: float) -> NodalField:
    """Advance one step with the classic explicit RK4 scheme.

    Stages:
        K1 = F(U_s),  K2 = F(U_s + dt/2 K1),  K3 = F(U_s + dt/2 K2),
        K4 = F(U_s + dt K3),
        U_{s+1} = U_s + dt/6 (K1 + 2 K2 + 2 K3 + K4).

    The system is autonomous, so the stage times carried on the stage fields
    are inert. A non-finite stage raises InstabilityError with its index.
    """
    dt = float(dt)
    if dt <= 0.0 or not np.isfinite(dt):
        raise ValueError(f"dt must be finite and > 0, got {dt!r}")

    def stage(index: int, values: np.ndarray, time: float) -> np.ndarray:
        try:
            k = rhs(NodalField(values, time), g, p).values
        except (InvalidStateError, SymmetryError) as err:
            # A SymmetryError here can only come from overflow contamination:
            # every spectrum inside rhs derives from real nodal data.
            raise InstabilityError(index, time) from err
        if not np.all(np.isfinite(k)):
            raise InstabilityError(index, time)
        return k

    t = u.time
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = stage(1, u.values, t)
        k2 = stage(2, u.values + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = stage(3, u.values + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = stage(4, u.values + dt * k3, t + dt)
        new = u.values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return NodalField(new, t + dt)


def stable_dt(u: NodalField, g: GridSpec, p: SimParams) -> float:
    """CFL-style step bound, recomputed every step when dt is "auto".

    min( C_adv/(max|u|*k_max + eps), C_diff/(gamma*k_max^alpha + eps) ) with
    k_max = N/2. Degenerate inputs (zero field, gamma 0) give a huge value
    that the run loop caps at the distance to the next stop time.
    """
    if not np.all(np.isfinite(u.values)):
        raise InvalidStateError(f"non-finite field handed to stable_dt at t={u.time:.6g}")
    k_max = g.n / 2.0
    advective = CFL_ADVECTION / (float(np.max(np.abs(u.values))) * k_max + DT_GUARD)
    dissipative = CFL_DISSIPATION / (p.effective_gamma * k_max**p.alpha + DT_GUARD)
    return min(advective, dissipative)
