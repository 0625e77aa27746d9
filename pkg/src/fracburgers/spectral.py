"""Discrete torus geometry and spectral operators.

The domain is the 2*pi-periodic interval sampled at N uniform nodes
x_j = pi*(2j - N)/N for j = 0..N-1 (N even), i.e. the grid starts at -pi
and excludes +pi. A nodal field is represented spectrally by the
coefficients of its trigonometric interpolant

    u(x_j) = sum_{k=-N/2}^{N/2-1} c_k exp(i k x_j),
    c_k    = (1/N) sum_j u(x_j) exp(-i k x_j),

and the derivative and fractional laplacian act on the c_k as the diagonal
multipliers i*k and |k|**alpha. The fractional laplacian is defined
spectrally; no convolution kernel is used anywhere.

Transforms go through numpy's FFT. The grid is offset by -pi from the
FFT-native grid, which contributes the exact phase (-1)^k to every
coefficient; the phase is applied explicitly and costs no precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEALIAS_RULES = ("off", "two_thirds")

# Relative tolerance on the imaginary residue a real-data inverse may carry.
IMAG_RESIDUE_RTOL = 1e-12


class SymmetryError(ValueError):
    """Spectral coefficients lack the conjugate symmetry of real data."""


def validate_alpha(alpha: float) -> float:
    """Return alpha as float after checking 0 < alpha <= 2."""
    a = float(alpha)
    if not 0.0 < a <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha!r}")
    return a


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Uniform periodic grid: node count, node coordinates, wavenumbers.

    Construct through :func:`make_grid`; the arrays are derived from ``n``
    and treated as read-only.
    """

    n: int
    nodes: np.ndarray        # x_j = pi*(2j - n)/n, strictly increasing
    wavenumbers: np.ndarray  # integers -n/2 .. n/2 - 1
    mode_phase: np.ndarray   # (-1)^k in wavenumber order

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.n


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Interpolant coefficients c_k indexed by wavenumber k = -N/2 .. N/2-1.

    Conjugate symmetry c_{-k} = conj(c_k) holds whenever the field came from
    real nodal data; it is checked where it matters (inverse transform), not
    at construction, so intermediate edits stay representable.
    """

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or len(c) < 4 or len(c) % 2:
            raise ValueError(
                f"coefficient array must be 1-D with even length >= 4, got shape {c.shape}"
            )
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @property
    def wavenumbers(self) -> np.ndarray:
        half = self.n // 2
        return np.arange(-half, half)


@dataclass(frozen=True, eq=False)
class NodalField:
    """Real nodal values u(x_j) plus the simulation time they belong to.

    Finiteness is not enforced here: a field that went non-finite must still
    be representable long enough for the failure paths to report it.
    """

    values: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError(f"nodal values must be 1-D, got shape {v.shape}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "time", float(self.time))


def make_grid(n: int) -> GridSpec:
    """Build the uniform grid with n nodes (n even, n >= 4)."""
    if n != int(n):
        raise ValueError(f"node count n must be an integer, got {n!r}")
    n = int(n)
    if n % 2 or n < 4:
        raise ValueError(f"node count n must be even and >= 4, got {n}")
    j = np.arange(n)
    nodes = np.pi * (2.0 * j - n) / n
    wavenumbers = np.arange(-(n // 2), n // 2)
    phase = np.where(wavenumbers % 2 == 0, 1.0, -1.0)
    return GridSpec(n=n, nodes=nodes, wavenumbers=wavenumbers, mode_phase=phase)


def forward_dft(u: NodalField, g: GridSpec) -> SpectralField:
    """Interpolant coefficients of nodal data, 1/N normalization.

    c_k = (1/N) sum_j u(x_j) exp(-i k x_j). Computed as an FFT reordered to
    wavenumber order, times the grid-offset phase (-1)^k.
    """
    if len(u.values) != g.n:
        raise ValueError(f"field length {len(u.values)} does not match grid n={g.n}")
    coeffs = np.fft.fftshift(np.fft.fft(u.values)) * (g.mode_phase / g.n)
    # Real samples have conjugate-symmetric coefficients, but the FFT breaks
    # that by ~1e-16 per entry, and multipliers like |k|^2 amplify the
    # asymmetric dust past any fixed inverse-transform tolerance on long runs.
    # Symmetrize so downstream operators preserve the invariant exactly.
    paired = coeffs[1:]
    coeffs[1:] = 0.5 * (paired + paired[::-1].conj())
    coeffs[0] = coeffs[0].real
    return SpectralField(coeffs)


def inverse_dft(s: SpectralField, g: GridSpec, time: float = 0.0) -> NodalField:
    """Evaluate the interpolant at the nodes: u(x_l) = sum_k c_k exp(i k x_l).

    The result of a conjugate-symmetric field is real up to round-off; the
    imaginary residue is checked against IMAG_RESIDUE_RTOL * ||c|| and
    discarded. A residue beyond that tolerance means the coefficients do not
    describe real data.
    """
    if s.n != g.n:
        raise ValueError(f"spectral length {s.n} does not match grid n={g.n}")
    w = np.fft.ifft(np.fft.ifftshift(s.coeffs * g.mode_phase)) * g.n
    residue = float(np.max(np.abs(w.imag)))
    scale = float(np.linalg.norm(s.coeffs))
    if residue > IMAG_RESIDUE_RTOL * scale:
        raise SymmetryError(
            f"imaginary residue {residue:.3e} exceeds {IMAG_RESIDUE_RTOL:.0e} * ||c|| = "
            f"{IMAG_RESIDUE_RTOL * scale:.3e}; coefficients are not conjugate-symmetric"
        )
    return NodalField(w.real, time)


def spectral_derivative(s: SpectralField) -> SpectralField:
    """Differentiate the interpolant: c_k -> i*k*c_k, Nyquist mode dropped.

    The mode k = -N/2 has no conjugate partner, so its derivative has no
    real nodal representative; its coefficient is set to 0.
    """
    out = 1j * s.wavenumbers * s.coeffs
    out[0] = 0.0
    return SpectralField(out)


def fractional_laplacian(s: SpectralField, alpha: float) -> SpectralField:
    """Apply the multiplier |k|**alpha, alpha in (0, 2]. Zero mode maps to 0."""
    a = validate_alpha(alpha)
    mult = np.abs(s.wavenumbers).astype(float) ** a
    return SpectralField(mult * s.coeffs)


def dealias(s: SpectralField, rule: str) -> SpectralField:
    """Zero the aliasing-prone tail of a product per the 2/3 rule.

    rule "off" returns the field unchanged; "two_thirds" zeroes every
    coefficient with |k| > N/3.
    """
    if rule not in DEALIAS_RULES:
        raise ValueError(f"unknown dealias rule {rule!r}, expected one of {DEALIAS_RULES}")
    if rule == "off":
        return SpectralField(s.coeffs.copy())
    keep = np.abs(s.wavenumbers) <= s.n / 3.0
    return SpectralField(np.where(keep, s.coeffs, 0.0))
