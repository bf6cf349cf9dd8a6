"""Quantization/coherence correlation of measurement outcomes.

quantization(n_m) = cos(2 pi n_m) grades how integer-like an outcome
is: +1 at integers, -1 at half-integers. correlation_numeric estimates,
by trapezoid quadrature with weight P(n_m) d n_m, the outcome averages
of quantization, of conditional coherence, and of their product, and
the covariance between them; it works for arbitrary states, with the
closed forms of :mod:`fockpovm.closed_form` as the oracle on coherent
inputs.

The same anticorrelation appears on the operator side: splitting the
diagonal parity pair (-1)^n around the lowering operator flips its
sign, so the ordered correlation equals -2 <a> for every state and
every truncation, with no resolution dependence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FockPovmError, GridInsufficient
from .fock import DensityMatrix, make_coherent_state
from .measurement import (
    OutcomeGrid,
    as_resolution,
    coherence_numerator_grid,
    default_grid,
    outcome_density_grid,
)

GRID_NORMALIZATION_TOL = 1e-6


@dataclass(frozen=True)
class CorrelationReport:
    """Outcome averages at one resolution and the covariance built from them."""

    dn: float
    avg_q: float
    avg_a: complex
    avg_qa: complex
    c: complex
    grid: OutcomeGrid


def quantization(nm):
    """cos(2 pi n_m); scalar in, scalar out, arrays broadcast."""
    x = np.asarray(nm, dtype=float)
    q = np.cos(2.0 * math.pi * x)
    return float(q) if x.ndim == 0 else q


def correlation_numeric(rho: DensityMatrix, dn, grid: OutcomeGrid | None = None) -> CorrelationReport:
    """Quadrature estimate of the quantization/coherence covariance.

    Averages carry the weight P(n_m) d n_m; the grid must capture the
    whole density (trapezoid sum of P equals 1 within 1e-6), otherwise
    GridInsufficient is raised. The coherence average integrates the
    undivided product P * <a>_f, so vanishing densities never divide.
    """
    res = as_resolution(dn)
    if grid is None:
        grid = default_grid(rho, res)
    x = grid.points
    w = grid.weights
    p = outcome_density_grid(rho, res, x)
    total = float(np.dot(w, p))
    if abs(total - 1.0) > GRID_NORMALIZATION_TOL:
        raise GridInsufficient(
            f"grid [{grid.lo}, {grid.hi}] step {grid.step} integrates the density"
            f" to {total!r}, not 1 within {GRID_NORMALIZATION_TOL:.0e}"
        )
    q = np.cos(2.0 * math.pi * x)
    pa = coherence_numerator_grid(rho, res, x)
    avg_q = float(np.dot(w, q * p))
    avg_a = complex(np.dot(w, pa))
    avg_qa = complex(np.dot(w, q * pa))
    return CorrelationReport(
        dn=res.dn,
        avg_q=avg_q,
        avg_a=avg_a,
        avg_qa=avg_qa,
        c=avg_qa - avg_q * avg_a,
        grid=grid,
    )


def resolution_sweep(state, dn_values) -> list[CorrelationReport]:
    """One correlation report per resolution, order preserved.

    `state` is a DensityMatrix or a coherent amplitude (truncated by the
    default rule). A failure at any sweep point is re-raised with the
    offending resolution named.
    """
    rho = state if isinstance(state, DensityMatrix) else make_coherent_state(complex(state))
    values = list(dn_values)
    if not values:
        raise ValueError("dn_values must be a nonempty sequence")
    reports = []
    for dn in values:
        try:
            reports.append(correlation_numeric(rho, dn))
        except FockPovmError as exc:
            raise type(exc)(f"sweep point dn={dn!r}: {exc}") from exc
    return reports


def parity_diagonal(dim: int) -> np.ndarray:
    """Diagonal of (-1)^n: exact alternating signs, no floating-point cosines."""
    return (-1.0) ** np.arange(dim)


def annihilation_matrix(dim: int) -> np.ndarray:
    """Lowering operator matrix: <n-1| a |n> = sqrt(n)."""
    a = np.zeros((dim, dim))
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def quantization_operator_expectation(rho: DensityMatrix) -> float:
    """Expectation of the squared parity ((-1)^n)^2.

    Its integer spectrum makes it the identity, so the value is 1 for
    every valid state; it is computed from the actual diagonal so the
    ordered-correlation decomposition below is evaluated, not assumed.
    """
    squared_parity = parity_diagonal(rho.dim) ** 2
    return float(np.dot(squared_parity, rho.populations))


def operator_correlation(rho: DensityMatrix) -> complex:
    """Ordered correlation <P a P> - <P^2><a> with the parity P = (-1)^n.

    The parity sandwich flips the sign of every lowering-operator
    element, so this equals -2 <a> identically at any truncation.
    """
    par = parity_diagonal(rho.dim)
    a = annihilation_matrix(rho.dim)
    sandwiched = par[:, None] * a * par[None, :]
    m = rho.matrix
    sandwich_exp = complex(np.einsum("ij,ji->", sandwiched, m))
    plain_exp = complex(np.einsum("ij,ji->", a, m))
    return sandwich_exp - quantization_operator_expectation(rho) * plain_exp
