"""Cross-module consistency checks behind the ``verify`` CLI command.

Each check pits two independent routes against each other: operator
pipeline vs closed forms, quadrature vs analytic integrals, and the
parity-sandwich identity on random states. A fresh build must pass all
of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closed_form, correlation, measurement, trajectory
from .fock import TruncationConfig, annihilation_expectation, make_coherent_state, random_density_matrix

DUAL_PATH_TOL = 1e-9
COMPLETENESS_TOL = 1e-9
IDENTITY_TOL = 1e-12
QUADRATURE_REL_TOL = 1e-6

_RANDOM_STATE_SEED = 715517


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _dual_path_checks() -> list[CheckResult]:
    alpha, dn, dim = 3.0, 0.3, 40
    rho = make_coherent_state(alpha, TruncationConfig(dim))
    grid = measurement.default_grid(rho, dn)
    x = grid.points

    p_operator = measurement.outcome_density_grid(rho, dn, x)
    p_closed = closed_form.coherent_outcome_density(alpha, dn, x)
    density_err = float(np.max(np.abs(p_operator - p_closed)))

    mask = p_closed > 1e-12
    a_operator = measurement.coherence_numerator_grid(rho, dn, x)[mask] / p_operator[mask]
    a_closed = closed_form.coherent_post_coherence(alpha, dn, x[mask])
    coherence_err = float(np.max(np.abs(a_operator - a_closed)))

    return [
        CheckResult(
            name="dual-path-density",
            passed=density_err <= DUAL_PATH_TOL,
            detail=f"max |P_operator - P_closed| = {density_err:.3e} (tol {DUAL_PATH_TOL:.0e})",
        ),
        CheckResult(
            name="dual-path-coherence",
            passed=coherence_err <= DUAL_PATH_TOL,
            detail=f"max |a_f_operator - a_f_closed| = {coherence_err:.3e} (tol {DUAL_PATH_TOL:.0e})",
        ),
    ]


def _completeness_check() -> CheckResult:
    dim = 40
    worst = 0.0
    for dn in (0.3, 1.0):
        grid = measurement.default_grid(dim, dn)
        x = grid.points
        w = grid.weights
        n = np.arange(dim)
        squared = np.exp(-((x[None, :] - n[:, None]) ** 2) / (2.0 * dn * dn))
        squared /= np.sqrt(2.0 * np.pi) * dn
        norms = squared @ w
        worst = max(worst, float(np.max(np.abs(norms - 1.0))))
    return CheckResult(
        name="povm-completeness",
        passed=worst <= COMPLETENESS_TOL,
        detail=f"max |integral g_n^2 - 1| = {worst:.3e} (tol {COMPLETENESS_TOL:.0e})",
    )


def _operator_identity_check() -> CheckResult:
    rng = trajectory.make_rng(_RANDOM_STATE_SEED)
    worst_identity = 0.0
    worst_parity = 0.0
    for _ in range(100):
        rho = random_density_matrix(32, rng)
        c = correlation.operator_correlation(rho)
        worst_identity = max(worst_identity, abs(c + 2.0 * annihilation_expectation(rho)))
        q = correlation.quantization_operator_expectation(rho)
        worst_parity = max(worst_parity, abs(q - 1.0))
    passed = worst_identity <= IDENTITY_TOL and worst_parity <= IDENTITY_TOL
    return CheckResult(
        name="operator-identity",
        passed=passed,
        detail=(
            f"max |C + 2<a>| = {worst_identity:.3e},"
            f" max |<parity^2> - 1| = {worst_parity:.3e} (tol {IDENTITY_TOL:.0e})"
        ),
    )


def _quadrature_closed_form_check() -> CheckResult:
    alpha = 3.0
    rho = make_coherent_state(alpha)
    worst = 0.0
    for dn in (0.1, 0.2, 0.3, 0.5, 1.0):
        report = correlation.correlation_numeric(rho, dn)
        closed = closed_form.correlation_closed(alpha, dn)
        worst = max(worst, abs(report.c - closed) / abs(closed))
    return CheckResult(
        name="quadrature-closed-form",
        passed=worst <= QUADRATURE_REL_TOL,
        detail=f"max relative |c_numeric - c_closed| = {worst:.3e} (tol {QUADRATURE_REL_TOL:.0e})",
    )


def run_checks() -> list[CheckResult]:
    """Run every consistency check and return the results in a fixed order."""
    results = _dual_path_checks()
    results.append(_completeness_check())
    results.append(_operator_identity_check())
    results.append(_quadrature_closed_form_check())
    return results
