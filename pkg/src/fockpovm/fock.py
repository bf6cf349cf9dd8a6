"""Truncated photon-number (Fock) basis: states and expectation values.

Everything lives in a D-dimensional number basis |0>..|D-1>. States are
dense Hermitian density matrices with unit trace; the operators needed
here are diagonal in the number basis or shift it by one, so every
contraction is at worst O(D^2). Coherent-state amplitudes are built by a
stable recurrence, which keeps dimensions up to a few hundred and mean
photon numbers up to 100 free of factorial overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import IndexOutOfRange, InvalidState, TruncationTooSmall

# Construction tolerances for density matrices.
HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-12
PSD_ATOL = 1e-10


@dataclass(frozen=True)
class TruncationConfig:
    """Basis size and the probability mass allowed to fall outside it."""

    dim: int
    tail_tolerance: float = 1e-12

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise InvalidState(f"truncation dimension must be a positive integer, got {self.dim!r}")
        if not 0.0 <= self.tail_tolerance < 1.0:
            raise InvalidState(f"tail tolerance must lie in [0, 1), got {self.tail_tolerance!r}")


class DensityMatrix:
    """Hermitian unit-trace matrix rho_nm in the number basis.

    The stored array is symmetrized to be exactly Hermitian and marked
    read-only, so states can be shared freely; all operations on states
    are pure functions returning new instances.
    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidState(f"density matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m.view(np.float64))):
            raise InvalidState("density matrix contains NaN or Inf entries")
        defect = float(np.max(np.abs(m - m.conj().T)))
        if defect > HERMITICITY_ATOL:
            raise InvalidState(f"matrix is not Hermitian: max |rho - rho^dag| = {defect:.3e}")
        m = (m + m.conj().T) / 2.0
        trace = float(m.trace().real)
        if abs(trace - 1.0) > TRACE_ATOL:
            raise InvalidState(f"trace must equal 1 within {TRACE_ATOL:.0e}, got {trace!r}")
        m.setflags(write=False)
        self._matrix = m

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """The full complex matrix (read-only view)."""
        return self._matrix

    @property
    def populations(self) -> np.ndarray:
        """Diagonal rho_nn as a real vector (exact: the diagonal is real by Hermiticity)."""
        return np.ascontiguousarray(self._matrix.diagonal().real)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


def default_dim(alpha: complex) -> int:
    """Truncation dimension for a coherent amplitude: mean + 10 sigma + margin.

    Keeps the Poisson tail mass outside the basis below 1e-12 for mean
    photon numbers up to 100, so results are reproducible without tuning.
    """
    mean = abs(alpha) ** 2
    return math.ceil(mean + 10.0 * math.sqrt(mean + 1.0) + 20.0)


def coherent_tail_mass(alpha: complex, dim: int) -> float:
    """Poisson tail mass sum_{n >= dim} e^{-|a|^2} |a|^{2n} / n!."""
    return float(stats.poisson.sf(dim - 1, abs(alpha) ** 2))


def make_coherent_state(alpha: complex, cfg: TruncationConfig | None = None) -> DensityMatrix:
    """Truncated coherent state |alpha><alpha| in the number basis.

    Amplitudes follow the recurrence c_{n+1} = c_n * alpha / sqrt(n+1)
    from c_0 = e^{-|alpha|^2/2}, so rho = c c^dag is positive
    semidefinite by construction; after truncation rho is renormalized
    to unit trace. With cfg omitted the dimension comes from
    :func:`default_dim`.

    Raises TruncationTooSmall when the Poisson tail mass outside the
    basis exceeds ``cfg.tail_tolerance``.
    """
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise InvalidState(f"coherent amplitude must be finite, got {alpha!r}")
    if cfg is None:
        cfg = TruncationConfig(default_dim(alpha))
    tail = coherent_tail_mass(alpha, cfg.dim)
    if tail > cfg.tail_tolerance:
        raise TruncationTooSmall(
            f"Poisson tail mass beyond dim={cfg.dim} is {tail:.6e}"
            f" (allowed {cfg.tail_tolerance:.1e}); enlarge the basis",
            tail_mass=tail,
        )
    amps = np.empty(cfg.dim, dtype=np.complex128)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2.0)
    for n in range(1, cfg.dim):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    rho = np.outer(amps, amps.conj())
    norm = float(rho.trace().real)
    if norm <= 0.0:
        raise InvalidState(f"coherent amplitude |alpha|={abs(alpha):.3g} exhausts float64 range")
    return DensityMatrix(rho / norm)


def make_fock_state(n: int, cfg: TruncationConfig) -> DensityMatrix:
    """Number eigenstate |n><n| in a cfg.dim-dimensional basis."""
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise IndexOutOfRange(f"Fock index must be a nonnegative integer, got {n!r}")
    if n >= cfg.dim:
        raise IndexOutOfRange(f"Fock index {n} outside truncated basis of dimension {cfg.dim}")
    rho = np.zeros((cfg.dim, cfg.dim), dtype=np.complex128)
    rho[n, n] = 1.0
    return DensityMatrix(rho)


def annihilation_expectation(rho: DensityMatrix) -> complex:
    """Optical coherence <a> = sum_n sqrt(n+1) rho_{n+1,n}."""
    sub = np.diagonal(rho.matrix, offset=-1)
    return complex(np.dot(np.sqrt(np.arange(1, rho.dim)), sub))


def number_expectation(rho: DensityMatrix) -> float:
    """Mean photon number <n> = sum_n n rho_nn."""
    return float(np.dot(np.arange(rho.dim), rho.populations))


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2): 1 on pure states, 1/D on the maximally mixed state."""
    # For Hermitian rho, Tr(rho^2) is the squared Frobenius norm.
    return float(np.vdot(rho.matrix, rho.matrix).real)


def assert_valid_state(rho: DensityMatrix, check_psd: bool = True) -> None:
    """Debug/test validation beyond the construction invariants.

    Hermiticity and unit trace hold by construction; this additionally
    checks positive semidefiniteness through the smallest eigenvalue,
    which is O(D^3) and therefore not done on every operation.
    """
    m = rho.matrix
    if float(np.max(np.abs(m - m.conj().T))) != 0.0:
        raise InvalidState("stored matrix lost exact Hermiticity")
    if abs(float(m.trace().real) - 1.0) > TRACE_ATOL:
        raise InvalidState("stored matrix lost unit trace")
    if check_psd:
        smallest = float(np.linalg.eigvalsh(m)[0])
        if smallest < -PSD_ATOL:
            raise InvalidState(f"state has negative eigenvalue {smallest:.3e}")


def random_density_matrix(dim: int, rng: np.random.Generator) -> DensityMatrix:
    """Random full-rank state G G^dag / Tr(G G^dag) with complex Gaussian G."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return DensityMatrix(rho / rho.trace().real)
