"""Closed-form coherent-state statistics against brute-force and quadrature oracles."""

import math

import numpy as np
import pytest

import fockpovm as fp
from fockpovm.closed_form import CoherentSeries

from oracles import coherent_coherence, coherent_density


def test_vacuum_density_is_single_gaussian():
    assert fp.coherent_outcome_density(0.0, 0.3, 0.0) == pytest.approx(1.3298076013381088, rel=1e-12)
    assert fp.coherent_outcome_density(0.0, 0.3, 0.5) == pytest.approx(
        math.exp(-0.25 / 0.18) / math.sqrt(2.0 * math.pi * 0.09), rel=1e-12
    )


def test_density_against_direct_summation():
    for nm in (0.0, 3.7, 9.0, 9.25, 12.5):
        assert fp.coherent_outcome_density(3.0, 0.3, nm) == pytest.approx(
            coherent_density(nm, 0.3, 3.0), rel=1e-12
        )
    assert fp.coherent_outcome_density(3.0, 0.3, 9.0) == pytest.approx(0.1764966100568896, rel=1e-12)


def test_density_comb_structure():
    # Separated Gaussian peaks at the integers under a Poisson envelope.
    for k in range(5, 14):
        peak = fp.coherent_outcome_density(3.0, 0.3, float(k))
        assert peak > fp.coherent_outcome_density(3.0, 0.3, k - 0.5)
        assert peak > fp.coherent_outcome_density(3.0, 0.3, k + 0.5)
    d = lambda nm: fp.coherent_outcome_density(3.0, 0.3, nm)
    assert d(9.0) > d(6.0) > d(3.0)


def test_density_vectorized_matches_scalar():
    points = np.array([0.5, 4.0, 9.25])
    values = fp.coherent_outcome_density(3.0, 0.3, points)
    for x, value in zip(points, values):
        assert value == fp.coherent_outcome_density(3.0, 0.3, float(x))


def test_post_coherence_against_direct_summation():
    frozen = {
        8.5: 1.5109332431126905,
        9.0: 0.37034386334924285,
        9.25: 0.7524432811475729,
        9.5: 1.5905234057573978,
    }
    for nm, expected in frozen.items():
        value = fp.coherent_post_coherence(3.0, 0.3, nm)
        assert value.imag == 0.0
        assert value.real == pytest.approx(expected, rel=1e-12)
        assert value.real == pytest.approx(coherent_coherence(nm, 0.3, 3.0).real, rel=1e-12)
    ratio = frozen[9.0] / frozen[9.25]
    assert ratio == pytest.approx(0.4921884115762464, rel=1e-12)
    assert ratio < 1.0


def test_post_coherence_large_dn_keeps_alpha():
    # A resolution far above the level spacing learns nothing and leaves
    # the amplitude untouched. The residual at finite dn is
    # ~ alpha (n_m - mean + 1/4) / (2 dn^2) plus the 1/(8 dn^2) prefactor,
    # so the window must shrink relative to dn^2.
    for nm in (0.0, 5.3, 9.0, 60.0):
        assert abs(fp.coherent_post_coherence(3.0, 1e6, nm) - 3.0) <= 1e-10
    assert abs(fp.coherent_post_coherence(3.0, 100.0, 9.25) - 3.0) <= 1e-4
    assert abs(fp.coherent_post_coherence(3.0, 100.0, 0.0) - 3.0) <= 3 * 9.25 / 2e4 + 1e-4
    assert abs(fp.coherent_post_coherence(2.0 + 1.0j, 1e6, 4.2) - (2.0 + 1.0j)) <= 1e-10


def test_post_coherence_peaks_at_half_integers():
    # In the comb region the coherence alternates against the density:
    # maxima near half-integers, minima near integers. The Poisson
    # envelope drags each maximum off its half-integer k + 1/2 by
    # dn^2 ln(mean/(k+1)), which vanishes at the mean and stays below
    # 0.02 only for k+1 within mean * e^{+-0.22}; assert the tight claim
    # on the central window and the shift law further out.
    x = np.arange(7.0, 11.0 + 1e-12, 0.001)
    mag = np.abs(fp.coherent_post_coherence(3.0, 0.3, x))
    interior = np.arange(1, x.size - 1)
    maxima = x[interior[(mag[interior] > mag[interior - 1]) & (mag[interior] > mag[interior + 1])]]
    minima = x[interior[(mag[interior] < mag[interior - 1]) & (mag[interior] < mag[interior + 1])]]
    assert maxima.size == 4 and minima.size == 3
    for peak in maxima:
        assert abs(peak % 1.0 - 0.5) <= 0.02
    for valley in minima:
        assert abs((valley + 0.5) % 1.0 - 0.5) <= 0.02
    for k in (4, 13):
        xs = np.arange(k + 0.2, k + 0.8, 1e-4)
        peak = xs[np.argmax(np.abs(fp.coherent_post_coherence(3.0, 0.3, xs)))]
        predicted = k + 0.5 - 0.09 * math.log(9.0 / (k + 1.0))
        assert abs(peak - predicted) <= 2e-3


def test_alternation_of_density_and_coherence():
    # At every half-integer in the comb the coherence beats its integer
    # neighbors while the density dips, and vice versa.
    d = lambda nm: fp.coherent_outcome_density(3.0, 0.3, nm)
    a = lambda nm: abs(fp.coherent_post_coherence(3.0, 0.3, nm))
    for k in range(4, 14):
        assert a(k + 0.5) > a(k) and a(k + 0.5) > a(k + 1)
        assert d(k + 0.5) < d(k) and d(k + 0.5) < d(k + 1)


def test_post_coherence_survives_deep_tails():
    # Underflow in the separate Gaussian sums must not produce NaN.
    value = fp.coherent_post_coherence(1.0, 0.1, 25.0)
    assert np.isfinite(value.real) and np.isfinite(value.imag)


def test_avg_quantization_values():
    assert fp.avg_quantization(0.3) == pytest.approx(0.16922454248244997, rel=1e-14)
    assert fp.avg_quantization(0.3) == math.exp(-2.0 * math.pi**2 * 0.09)
    assert fp.avg_quantization(1.0) == pytest.approx(2.675287991074243e-09, rel=1e-14)
    assert fp.avg_quantization(1e-6) == pytest.approx(1.0, abs=1e-10)


def test_avg_coherence_values():
    assert fp.avg_coherence(3.0, 0.3) == pytest.approx(0.7480566263318886, rel=1e-14)
    assert fp.avg_coherence(3.0, 0.1) == pytest.approx(1.1179959516236013e-05, rel=1e-14)
    assert abs(fp.avg_coherence(3.0, 1e9) - 3.0) <= 1e-12
    rotated = fp.avg_coherence(3.0j, 0.3)
    assert rotated == pytest.approx(0.7480566263318886j, rel=1e-14)


def test_avg_product_identity():
    assert fp.avg_product(3.0, 0.3) == -fp.avg_quantization(0.3) * fp.avg_coherence(3.0, 0.3)
    assert fp.avg_product(3.0, 0.3).real == pytest.approx(-0.1265895403419789, rel=1e-14)
    assert fp.avg_product(0.0, 0.3) == 0.0


def test_correlation_closed_values():
    c = fp.correlation_closed(3.0, 0.3)
    assert c.real == pytest.approx(-0.2531790806839578, rel=1e-14)
    assert c == fp.avg_product(3.0, 0.3) - fp.avg_quantization(0.3) * fp.avg_coherence(3.0, 0.3)
    assert c == -2.0 * fp.avg_quantization(0.3) * fp.avg_coherence(3.0, 0.3)
    # Vanishes in both limits: decoherence kills the average coherence at
    # sharp resolution, quantization washes out at coarse resolution.
    assert abs(fp.correlation_closed(3.0, 1e-3)) == 0.0
    assert abs(fp.correlation_closed(3.0, 1e3)) == 0.0


def test_quadrature_identities():
    # Trapezoid averages with weight P dn_m reproduce the closed forms.
    alpha = 3.0
    for dn in (0.1, 0.2, 0.3, 0.5, 1.0):
        grid = fp.default_grid(fp.default_dim(alpha), dn)
        x = grid.points
        w = grid.weights
        p = fp.coherent_outcome_density(alpha, dn, x)
        a_f = fp.coherent_post_coherence(alpha, dn, x)
        q = np.cos(2.0 * math.pi * x)
        avg_q = float(np.dot(w, q * p))
        avg_a = complex(np.dot(w, a_f * p))
        avg_qa = complex(np.dot(w, q * a_f * p))
        assert avg_q == pytest.approx(fp.avg_quantization(dn), rel=1e-6)
        assert avg_a == pytest.approx(fp.avg_coherence(alpha, dn), rel=1e-6)
        assert avg_qa == pytest.approx(fp.avg_product(alpha, dn), rel=1e-6)


def test_optimal_resolution():
    dn_star, peak = fp.optimal_resolution()
    assert dn_star == pytest.approx(0.28209479177387814, rel=1e-14)
    assert peak == pytest.approx(0.08642783652754452, rel=1e-12)
    assert round(dn_star, 1) == 0.3
    # One-dimensional scan oracle at step 1e-4.
    scan = np.arange(0.05, 1.0, 1e-4)
    values = np.array([-fp.correlation_closed(1.0, dn).real for dn in scan])
    best = int(np.argmax(values))
    assert abs(scan[best] - dn_star) <= 1e-4
    assert values[best] <= peak + 1e-15
    assert peak - values[best] <= 1e-8


def test_series_cutoff_guard():
    with pytest.raises(fp.TruncationTooSmall):
        fp.coherent_outcome_density(3.0, 0.3, 9.0, terms=20)


def test_coherent_series_wrapper():
    series = CoherentSeries.of(3.0, 0.3)
    assert series.terms == fp.default_dim(3.0)
    assert series.outcome_density(9.0) == fp.coherent_outcome_density(3.0, 0.3, 9.0)
    assert series.post_coherence(9.0) == fp.coherent_post_coherence(3.0, 0.3, 9.0)


def test_invalid_resolution_everywhere():
    for func in (
        lambda: fp.coherent_outcome_density(1.0, -0.1, 0.0),
        lambda: fp.coherent_post_coherence(1.0, 0.0, 0.0),
        lambda: fp.avg_quantization(-1.0),
        lambda: fp.avg_coherence(1.0, math.nan),
        lambda: fp.avg_product(1.0, 0.0),
        lambda: fp.correlation_closed(1.0, -2.0),
    ):
        with pytest.raises(fp.InvalidResolution):
            func()
