"""Gaussian finite-resolution measurement of photon number.

The measurement kernel is diagonal in the number basis with amplitude
profile g_n(n_m) = (2 pi dn^2)^(-1/4) exp(-(n_m - n)^2 / (4 dn^2)).
Sandwiching a state between two kernels gives the outcome density and
the conditional post-measurement state; averaging the update over all
outcomes damps the off-diagonals by exp(-(n-m)^2 / (8 dn^2)), which is
implemented in closed form rather than by quadrature.

Quadrature over outcomes uses a uniform grid spanning the occupied
number range plus 8 dn of Gaussian tail, with composite-trapezoid
weights; at the default step of dn/30 the rule integrates sums of
kernel Gaussians to ~1e-10 relative error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidResolution, NegligibleOutcome
from .fock import DensityMatrix, annihilation_expectation

# Below this outcome density the conditional update is numerically meaningless.
DENSITY_FLOOR = 1e-300

# Default-grid geometry: tail span in units of dn, points per dn, step cap.
GRID_SIGMA_SPAN = 8.0
GRID_POINTS_PER_SIGMA = 30.0
GRID_MAX_STEP = 0.05


@dataclass(frozen=True)
class Resolution:
    """Measurement resolution dn: the Gaussian kernel width in photon-number units."""

    dn: float

    def __post_init__(self):
        try:
            value = float(self.dn)
        except (TypeError, ValueError) as exc:
            raise InvalidResolution(f"resolution must be a real number, got {self.dn!r}") from exc
        if not (math.isfinite(value) and value > 0.0):
            raise InvalidResolution(f"resolution must be finite and > 0, got {value!r}")
        object.__setattr__(self, "dn", value)


def as_resolution(dn) -> Resolution:
    """Coerce a bare number to a validated Resolution."""
    return dn if isinstance(dn, Resolution) else Resolution(dn)


@dataclass(frozen=True)
class MeasurementOperator:
    """Diagonal measurement kernel for one outcome n_m at resolution dn."""

    resolution: Resolution
    nm: float
    diag: np.ndarray


@dataclass(frozen=True)
class MeasurementRecord:
    """One selective measurement: outcome, its density, and the conditional state."""

    nm: float
    density: float
    post_state: DensityMatrix
    post_coherence: complex


@dataclass(frozen=True)
class OutcomeGrid:
    """Uniform grid of outcome values n_m for quadrature over measurement results."""

    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError(f"grid bounds must be finite with lo < hi, got [{self.lo}, {self.hi}]")
        if not (math.isfinite(self.step) and self.step > 0.0):
            raise ValueError(f"grid step must be finite and > 0, got {self.step!r}")
        ratio = (self.hi - self.lo) / self.step
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError(
                f"grid span {self.hi - self.lo} is not an integer multiple of step {self.step}"
            )

    @property
    def count(self) -> int:
        """Number of grid points, endpoints included."""
        return int(round((self.hi - self.lo) / self.step)) + 1

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    @property
    def weights(self) -> np.ndarray:
        """Composite-trapezoid quadrature weights (step, halved at the endpoints)."""
        w = np.full(self.count, self.step)
        w[0] = w[-1] = self.step / 2.0
        return w


def _kernel_diagonal(dn: float, nm: float, dim: int) -> np.ndarray:
    """Amplitude profile g_n = (2 pi dn^2)^(-1/4) exp(-(n_m - n)^2 / (4 dn^2))."""
    n = np.arange(dim)
    return (2.0 * math.pi * dn * dn) ** -0.25 * np.exp(-((nm - n) ** 2) / (4.0 * dn * dn))


def make_measurement_operator(dn, nm: float, dim: int) -> MeasurementOperator:
    """Kernel for outcome n_m on a dim-dimensional basis."""
    res = as_resolution(dn)
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    diag = _kernel_diagonal(res.dn, float(nm), dim)
    diag.setflags(write=False)
    return MeasurementOperator(resolution=res, nm=float(nm), diag=diag)


def outcome_density(rho: DensityMatrix, dn, nm: float) -> float:
    """Probability density of reading n_m.

    Equals sum_n rho_nn (2 pi dn^2)^(-1/2) exp(-(n_m - n)^2 / (2 dn^2)):
    the kernel is diagonal, so only the populations enter.
    """
    res = as_resolution(dn)
    g = _kernel_diagonal(res.dn, float(nm), rho.dim)
    return float(np.dot(rho.populations, g * g))


def outcome_density_grid(rho: DensityMatrix, dn, outcomes) -> np.ndarray:
    """Vectorized outcome_density over an array of n_m values."""
    res = as_resolution(dn)
    x = np.asarray(outcomes, dtype=float)
    n = np.arange(rho.dim)
    squared = np.exp(-((x[None, :] - n[:, None]) ** 2) / (2.0 * res.dn**2))
    squared /= math.sqrt(2.0 * math.pi) * res.dn
    return rho.populations @ squared


def coherence_numerator_grid(rho: DensityMatrix, dn, outcomes) -> np.ndarray:
    """P(n_m) * <a>_f(n_m) on a grid of outcomes.

    Computed directly as sum_n sqrt(n+1) rho_{n+1,n} g_n g_{n+1}, so the
    product is available without dividing by vanishing densities; it is
    also exactly the integrand of the coherence average over outcomes.
    """
    res = as_resolution(dn)
    x = np.asarray(outcomes, dtype=float)
    n = np.arange(rho.dim)
    g = (2.0 * math.pi * res.dn**2) ** -0.25 * np.exp(
        -((x[None, :] - n[:, None]) ** 2) / (4.0 * res.dn**2)
    )
    sub = np.diagonal(rho.matrix, offset=-1) * np.sqrt(np.arange(1, rho.dim))
    return sub @ (g[:-1] * g[1:])


def apply_measurement(rho: DensityMatrix, dn, nm: float) -> MeasurementRecord:
    """Conditional update for outcome n_m: rho -> g rho g / P(n_m).

    Raises NegligibleOutcome when P(n_m) <= DENSITY_FLOOR, where the
    normalization would amplify floating-point noise instead of a state.
    """
    res = as_resolution(dn)
    g = _kernel_diagonal(res.dn, float(nm), rho.dim)
    density = float(np.dot(rho.populations, g * g))
    if density <= DENSITY_FLOOR:
        raise NegligibleOutcome(
            f"outcome n_m={nm} has density {density:.3e} <= {DENSITY_FLOOR:.0e}"
        )
    # Dividing the real kernel product first keeps number states exact
    # fixed points (g_n^2 / density == 1 at the occupied level).
    post = DensityMatrix(rho.matrix * (np.outer(g, g) / density))
    return MeasurementRecord(
        nm=float(nm),
        density=density,
        post_state=post,
        post_coherence=annihilation_expectation(post),
    )


def nonselective_update(rho: DensityMatrix, dn) -> DensityMatrix:
    """Average over all outcomes: off-diagonal (n,m) damped by exp(-(n-m)^2/(8 dn^2)).

    This is the exact Gaussian integral of P(n_m) * rho_f(n_m) over n_m;
    the diagonal (and hence the trace) is untouched.
    """
    res = as_resolution(dn)
    n = np.arange(rho.dim, dtype=float)
    damping = np.exp(-((n[:, None] - n[None, :]) ** 2) / (8.0 * res.dn**2))
    return DensityMatrix(rho.matrix * damping)


def default_grid(state_or_dim, dn, refinement: float = 1.0) -> OutcomeGrid:
    """Outcome grid covering the basis range plus 8 dn of tail on each side.

    The step targets dn / (30 * refinement), capped at 0.05, then is
    rounded down so the span is an integer number of steps. Trapezoid
    quadrature on this grid normalizes smooth outcome densities to
    1 within ~1e-9.
    """
    res = as_resolution(dn)
    if not refinement >= 1.0:
        raise ValueError(f"refinement must be >= 1, got {refinement!r}")
    dim = state_or_dim.dim if isinstance(state_or_dim, DensityMatrix) else int(state_or_dim)
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    lo = -GRID_SIGMA_SPAN * res.dn
    hi = (dim - 1) + GRID_SIGMA_SPAN * res.dn
    target = min(res.dn / (GRID_POINTS_PER_SIGMA * refinement), GRID_MAX_STEP)
    segments = max(1, math.ceil((hi - lo) / target - 1e-9))
    return OutcomeGrid(lo=lo, hi=hi, step=(hi - lo) / segments)
