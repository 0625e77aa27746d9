"""Per-step observables, blow-up prediction, and detection policy.

Everything the run loop watches lives here: conserved mass, the L2 norm
(constant without dissipation before the shock, non-increasing with it),
nodal extrema (maximum principle), the minimum slope and its closed-form
evolution m(t) = m0/(1 + t*m0), the accumulated integral of ||u_x||_inf
(the continuation monitor: the solution persists while it stays finite),
a discrete H^3 norm (recorded qualitatively; the a-priori bound's constant
is not available), and the spectral tail fraction used as a resolution
monitor.

Norm conventions: l2 = sqrt(2*pi * sum |c_k|^2) (Parseval on the interpolant)
and sobolev s uses (1 + k^2)^s weights under the same 2*pi factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import (
    GridSpec,
    NodalField,
    SpectralField,
    forward_dft,
    inverse_dft,
    spectral_derivative,
)

TAIL_GUARD = 1e-300  # keeps the tail ratio defined for the zero field

CAUSES = ("slope_threshold", "non_finite", "resolution_loss", "none")


class SingularTimeError(ValueError):
    """The closed-form slope was evaluated exactly at its blow-up time."""


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Scalar observables of one time point."""

    t: float
    mass: float
    l2: float
    max_u: float
    min_u: float
    min_slope: float
    bkm_integral: float
    h3: float
    tail_fraction: float

    FIELDS = ("t", "mass", "l2", "max_u", "min_u", "min_slope",
              "bkm_integral", "h3", "tail_fraction")

    def astuple(self) -> tuple[float, ...]:
        return (self.t, self.mass, self.l2, self.max_u, self.min_u,
                self.min_slope, self.bkm_integral, self.h3, self.tail_fraction)


@dataclass(frozen=True)
class DetectionThresholds:
    slope_limit: float = 100.0
    tail_limit: float = 0.1

    def __post_init__(self) -> None:
        if not self.slope_limit > 0.0:
            raise ValueError(f"slope_limit must be > 0, got {self.slope_limit!r}")
        if not 0.0 < self.tail_limit < 1.0:
            raise ValueError(f"tail_limit must lie in (0, 1), got {self.tail_limit!r}")


@dataclass(frozen=True)
class BlowupReport:
    """Predicted vs detected blow-up for one run.

    Invariant: detected, detected_t being present, and detection_cause being
    something other than "none" all say the same thing.
    """

    predicted_t_star: float | None = None
    detected: bool = False
    detected_t: float | None = None
    detection_cause: str = "none"

    def __post_init__(self) -> None:
        if self.detection_cause not in CAUSES:
            raise ValueError(f"unknown detection cause {self.detection_cause!r}")
        if self.detected != (self.detected_t is not None) or \
                self.detected != (self.detection_cause != "none"):
            raise ValueError(
                "inconsistent report: detected, detected_t and detection_cause must agree"
            )


def mass(u: NodalField, g: GridSpec) -> float:
    """Integral of u over the interval: 2*pi times the zero coefficient.

    On a uniform periodic grid this is identical to the trapezoid rule.
    """
    c = forward_dft(u, g).coeffs
    return 2.0 * np.pi * float(c[g.n // 2].real)


def l2_norm(u: NodalField, g: GridSpec) -> float:
    return _l2_of(forward_dft(u, g))


def sobolev_norm(u: NodalField, g: GridSpec, s: float) -> float:
    """sqrt(2*pi * sum (1 + k^2)^s |c_k|^2); s = 0 reduces to l2_norm."""
    s = float(s)
    if s < 0.0:
        raise ValueError(f"sobolev order must be >= 0, got {s!r}")
    return _sobolev_of(forward_dft(u, g), s)


def extrema(u: NodalField) -> tuple[float, float]:
    """Nodal (max, min)."""
    return float(np.max(u.values)), float(np.min(u.values))


def min_slope(u: NodalField, g: GridSpec) -> float:
    """Minimum over nodes of the interpolant derivative."""
    slope = inverse_dft(spectral_derivative(forward_dft(u, g)), g, u.time)
    return float(np.min(slope.values))


def predicted_blowup_time(f: NodalField, g: GridSpec) -> float | None:
    """Closed-form shock time -1/m0 from the initial minimum slope.

    Meaningful as a prediction only without dissipation; callers running
    gamma > 0 label it an inviscid prediction. None when no slope is
    negative (such data never steepens into a shock).
    """
    m0 = min_slope(f, g)
    if m0 < 0.0:
        return -1.0 / m0
    return None


def slope_closed_form(m0: float, t: float) -> float:
    """Slope law m(t) = m0/(1 + t*m0) for the undissipated equation."""
    m0 = float(m0)
    t = float(t)
    denom = 1.0 + t * m0
    if denom == 0.0:
        raise SingularTimeError(f"slope law is singular at t = {t} for m0 = {m0}")
    return m0 / denom


def bkm_accumulate(prev_integral: float, prev_norm: float, new_norm: float,
                   dt: float) -> float:
    """One trapezoid increment of the integral of ||u_x||_inf over time."""
    return prev_integral + dt * (prev_norm + new_norm) / 2.0


def tail_fraction(s: SpectralField) -> float:
    """Share of (non-mean) spectral energy at |k| >= N/3.

    Approaching 1 means the top third of the resolved band carries the
    field: the grid has stopped resolving the solution.
    """
    power = np.abs(s.coeffs) ** 2
    k = s.wavenumbers
    tail = float(np.sum(power[np.abs(k) >= s.n / 3.0]))
    total = float(np.sum(power[k != 0]))
    return tail / (total + TAIL_GUARD)


def check_blowup(rec: DiagnosticsRecord,
                 thresholds: DetectionThresholds) -> BlowupReport:
    """Detection policy for one record.

    non_finite (any field NaN/Inf) outranks slope_threshold
    (|min_slope| > slope_limit), which outranks resolution_loss
    (tail_fraction > tail_limit). Returns a report fragment whose
    predicted_t_star is left unset; the run loop owns the prediction.
    """
    fields = rec.astuple()
    if not all(math.isfinite(v) for v in fields):
        cause = "non_finite"
    elif abs(rec.min_slope) > thresholds.slope_limit:
        cause = "slope_threshold"
    elif rec.tail_fraction > thresholds.tail_limit:
        cause = "resolution_loss"
    else:
        return BlowupReport()
    return BlowupReport(detected=True, detected_t=rec.t, detection_cause=cause)


def observe(u: NodalField, g: GridSpec, *, prev_bkm: float = 0.0,
            prev_slope_norm: float | None = None,
            dt: float = 0.0) -> tuple[DiagnosticsRecord, float]:
    """Assemble the full record for one state, sharing a single transform.

    Returns (record, slope_inf_norm); the caller threads the norm into the
    next call so the trapezoid accumulation sees both endpoints of each step.
    prev_slope_norm None marks the initial record (bkm starts at prev_bkm).
    """
    with np.errstate(over="ignore", invalid="ignore"):
        s = forward_dft(u, g)
        slope = inverse_dft(spectral_derivative(s), g, u.time).values
        slope_norm = float(np.max(np.abs(slope)))
        if prev_slope_norm is None:
            bkm = prev_bkm
        else:
            bkm = bkm_accumulate(prev_bkm, prev_slope_norm, slope_norm, dt)
        rec = DiagnosticsRecord(
            t=u.time,
            mass=2.0 * np.pi * float(s.coeffs[g.n // 2].real),
            l2=_l2_of(s),
            max_u=float(np.max(u.values)),
            min_u=float(np.min(u.values)),
            min_slope=float(np.min(slope)),
            bkm_integral=bkm,
            h3=_sobolev_of(s, 3.0),
            tail_fraction=tail_fraction(s),
        )
    return rec, slope_norm


def _l2_of(s: SpectralField) -> float:
    return math.sqrt(2.0 * np.pi * float(np.sum(np.abs(s.coeffs) ** 2)))


def _sobolev_of(s: SpectralField, order: float) -> float:
    w = (1.0 + s.wavenumbers.astype(float) ** 2) ** order
    return math.sqrt(2.0 * np.pi * float(np.sum(w * np.abs(s.coeffs) ** 2)))
