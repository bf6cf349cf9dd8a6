"""States and expectations in the truncated number basis."""

import math

import numpy as np
import pytest

import fockpovm as fp
from fockpovm.fock import assert_valid_state, coherent_tail_mass, random_density_matrix

from oracles import poisson_tail, truncated_poisson


def test_vacuum_is_ground_projector():
    rho = fp.make_coherent_state(0.0, fp.TruncationConfig(4))
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 0] = 1.0
    assert np.array_equal(rho.matrix, expected)


def test_coherent_mean_photon_number():
    rho = fp.make_coherent_state(3.0, fp.TruncationConfig(40))
    assert abs(fp.number_expectation(rho) - 9.0) <= 1e-9


def test_coherent_amplitude_expectation():
    rho = fp.make_coherent_state(3.0, fp.TruncationConfig(40))
    assert abs(fp.annihilation_expectation(rho) - 3.0) <= 1e-9
    alpha = 1.0 + 2.0j
    rho = fp.make_coherent_state(alpha)
    assert abs(fp.annihilation_expectation(rho) - alpha) <= 1e-10
    assert abs(fp.number_expectation(rho) - abs(alpha) ** 2) <= 1e-10


def test_coherent_ground_population():
    rho = fp.make_coherent_state(1.0, fp.TruncationConfig(20))
    # Renormalization shifts e^{-1} only by the 1e-20 Poisson tail.
    assert rho.matrix[0, 0].real == pytest.approx(0.36787944117144233, abs=1e-12)
    assert rho.matrix[0, 0].real == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_coherent_diagonal_is_truncated_poisson():
    rho = fp.make_coherent_state(2.0, fp.TruncationConfig(30))
    np.testing.assert_allclose(rho.populations, truncated_poisson(4.0, 30), rtol=1e-13)


def test_truncation_too_small():
    with pytest.raises(fp.TruncationTooSmall) as excinfo:
        fp.make_coherent_state(3.0, fp.TruncationConfig(10))
    reported = excinfo.value.tail_mass
    assert reported == pytest.approx(poisson_tail(9.0, 10), rel=1e-9)
    assert "tail" in str(excinfo.value)


def test_tail_mass_matches_bruteforce():
    for mean, dim in [(1.0, 8), (9.0, 25), (25.0, 60)]:
        alpha = math.sqrt(mean)
        assert coherent_tail_mass(alpha, dim) == pytest.approx(poisson_tail(mean, dim), rel=1e-9)


def test_fock_state_basics():
    rho = fp.make_fock_state(0, fp.TruncationConfig(3))
    assert np.array_equal(rho.populations, [1.0, 0.0, 0.0])
    rho = fp.make_fock_state(2, fp.TruncationConfig(5))
    assert np.array_equal(rho.populations, [0.0, 0.0, 1.0, 0.0, 0.0])
    with pytest.raises(fp.IndexOutOfRange):
        fp.make_fock_state(5, fp.TruncationConfig(4))
    with pytest.raises(fp.IndexOutOfRange):
        fp.make_fock_state(-1, fp.TruncationConfig(4))


def test_fock_states_have_no_coherence():
    for n in range(6):
        rho = fp.make_fock_state(n, fp.TruncationConfig(8))
        assert fp.annihilation_expectation(rho) == 0.0
        assert fp.number_expectation(rho) == float(n)
        assert fp.purity(rho) == 1.0


def test_annihilation_expectation_hand_case():
    # (|0><0| + |1><1| + |0><1| + |1><0|)/2: the only contribution is
    # sqrt(1) * rho_{1,0} = 0.5.
    rho = fp.DensityMatrix(np.full((2, 2), 0.5, dtype=complex))
    assert fp.annihilation_expectation(rho) == pytest.approx(0.5, abs=1e-15)


def test_purity_cases():
    mixed = fp.DensityMatrix(np.diag([0.5, 0.5]).astype(complex))
    assert fp.purity(mixed) == pytest.approx(0.5, abs=1e-15)
    rho = fp.make_coherent_state(3.0, fp.TruncationConfig(40))
    assert fp.purity(rho) == pytest.approx(1.0, abs=1e-9)


def test_density_matrix_rejects_bad_input():
    with pytest.raises(fp.InvalidState):
        fp.DensityMatrix(np.array([[0.5, 0.5], [0.2, 0.5]], dtype=complex))  # not Hermitian
    with pytest.raises(fp.InvalidState):
        fp.DensityMatrix(np.diag([0.7, 0.2]).astype(complex))  # trace 0.9
    bad = np.diag([1.0, 0.0]).astype(complex)
    bad[1, 1] = np.nan
    with pytest.raises(fp.InvalidState):
        fp.DensityMatrix(bad)
    with pytest.raises(fp.InvalidState):
        fp.DensityMatrix(np.ones((2, 3), dtype=complex))


def test_stored_matrix_exactly_hermitian_and_readonly():
    rng = np.random.Generator(np.random.PCG64(11))
    rho = random_density_matrix(16, rng)
    m = rho.matrix
    assert float(np.max(np.abs(m - m.conj().T))) == 0.0
    assert abs(m.trace().real - 1.0) <= 1e-12
    with pytest.raises(ValueError):
        m[0, 0] = 2.0


def test_constructor_invariants_hold_after_operations():
    rho = fp.make_coherent_state(1.5, fp.TruncationConfig(25))
    for state in [rho, fp.nonselective_update(rho, 0.4), fp.apply_measurement(rho, 0.4, 2.3).post_state]:
        assert_valid_state(state)


def test_psd_check_flags_negative_eigenvalue():
    rho = fp.DensityMatrix(np.diag([1.5, -0.5]).astype(complex))
    with pytest.raises(fp.InvalidState):
        assert_valid_state(rho)
    assert_valid_state(rho, check_psd=False)


def test_large_amplitude_stability():
    # Mean photon number 100 in a 221-level basis: the recurrence must
    # stay finite and the moments must hit the ideal values.
    rho = fp.make_coherent_state(10.0)
    assert rho.dim == 221
    assert np.all(np.isfinite(rho.matrix.view(np.float64)))
    assert abs(fp.number_expectation(rho) - 100.0) <= 1e-11
    assert abs(fp.annihilation_expectation(rho) - 10.0) <= 1e-11
    assert fp.purity(rho) == pytest.approx(1.0, abs=1e-10)


def test_default_dim_rule():
    for alpha, expected in [(0.0, 30), (1.0, 36), (2.0, 47), (3.0, 61), (10.0, 221)]:
        assert fp.default_dim(alpha) == expected
        assert fp.default_dim(alpha) == math.ceil(
            abs(alpha) ** 2 + 10.0 * math.sqrt(abs(alpha) ** 2 + 1.0) + 20.0
        )


def test_truncation_config_validation():
    with pytest.raises(fp.InvalidState):
        fp.TruncationConfig(0)
    with pytest.raises(fp.InvalidState):
        fp.TruncationConfig(8, tail_tolerance=1.5)


def test_random_density_matrices_are_valid():
    rng = np.random.Generator(np.random.PCG64(202501))
    for _ in range(20):
        rho = random_density_matrix(12, rng)
        assert_valid_state(rho)
        assert abs(sum(rho.populations) - 1.0) <= 1e-12
