import math

import numpy as np
import pytest

from spectra.core import (
    DomainError,
    Grid,
    Interval,
    WaveFunction,
    gaussian_packet,
)
from spectra.closed_form import well_state
from spectra.kinematics import (
    line_fourier_transform,
    momentum_distribution,
    probability_momentum,
    probability_position,
    uncertainty_product,
)

PI = math.pi


def brute_force_transform(f: WaveFunction, p: np.ndarray, refine: int = 16) -> np.ndarray:
    """Oracle: dense trapezoid of the piecewise-linear interpolant."""
    xs = np.concatenate(([f.grid.interval.a], f.grid.points, [f.grid.interval.b]))
    fa, fb = f.boundary_values()
    ys = np.concatenate(([fa], f.values, [fb]))
    fine_x = np.linspace(xs[0], xs[-1], refine * len(xs))
    fine_re = np.interp(fine_x, xs, ys.real)
    fine_im = np.interp(fine_x, xs, ys.imag)
    fine = fine_re + 1j * fine_im
    out = np.empty(len(p), dtype=complex)
    for i, pv in enumerate(p):
        out[i] = np.trapezoid(fine * np.exp(-1j * pv * fine_x), fine_x)
    return out / (2.0 * PI)


def test_transform_matches_brute_force_oracle():
    g = Grid(Interval(0.0, PI), 200)
    psi = well_state(0, g)
    p = np.array([-7.3, -2.0, 0.0, 0.4, 3.1, 11.0])
    ours = line_fourier_transform(psi, p)
    oracle = brute_force_transform(psi, p, refine=64)
    np.testing.assert_allclose(ours, oracle, atol=2e-6)


def test_density_at_zero_momentum():
    # ft(0) = (1/2pi) sqrt(2/pi) * 2 = sqrt(2/pi)/pi, so the density at
    # p = 0 is 2pi |ft(0)|^2 = 4/pi^2
    g = Grid(Interval(0.0, PI), 3000)
    psi = well_state(0, g)
    dist = momentum_distribution(psi, np.array([0.0]))
    assert dist.density[0] == pytest.approx(4.0 / PI**2, abs=1e-6)


def test_density_symmetry_for_real_states():
    g = Grid(Interval(0.0, PI), 500)
    psi = well_state(2, g)
    p = np.linspace(-10.0, 10.0, 401)
    dist = momentum_distribution(psi, p)
    np.testing.assert_allclose(dist.density, dist.density[::-1], atol=1e-14)


def test_high_state_peaks_near_plus_minus_wavenumber():
    g = Grid(Interval(0.0, PI), 2000)
    psi = well_state(19, g)  # wavenumber 20
    p = np.linspace(-40.0, 40.0, 1601)  # step 0.05
    dist = momentum_distribution(psi, p)
    pos = p > 0
    peak_pos = p[pos][np.argmax(dist.density[pos])]
    neg = p < 0
    peak_neg = p[neg][np.argmax(dist.density[neg])]
    step = p[1] - p[0]
    assert abs(peak_pos - 20.0) <= step + 1e-12
    assert abs(peak_neg + 20.0) <= step + 1e-12


def test_plancherel_total_mass_and_tail_decay():
    g = Grid(Interval(0.0, PI), 2000)
    psi = well_state(0, g)
    masses = []
    for pmax in (20.0, 40.0, 80.0):
        p = np.linspace(-pmax, pmax, int(200 * pmax) + 1)
        dist = momentum_distribution(psi, p)
        masses.append(probability_momentum(dist, Interval(-pmax, pmax)))
    defects = [abs(1.0 - m) for m in masses]
    assert defects[0] > defects[1] > defects[2]
    assert defects[1] <= 1e-4
    for m in masses:
        assert m <= 1.0 + 1e-6  # window mass never overshoots the total


def test_probability_momentum_half_line_for_real_state():
    g = Grid(Interval(0.0, PI), 2000)
    psi = well_state(0, g)
    p = np.linspace(-50.0, 50.0, 10001)
    dist = momentum_distribution(psi, p)
    half = probability_momentum(dist, Interval(0.0, 50.0))
    assert half == pytest.approx(0.5, abs=1e-6)
    with pytest.raises(DomainError):
        probability_momentum(dist, Interval(0.0, 60.0))


def test_probability_momentum_subwindow_against_refined_oracle():
    g = Grid(Interval(0.0, PI), 2000)
    psi = well_state(0, g)
    coarse = momentum_distribution(psi, np.linspace(-1.0, 1.0, 801))
    fine = momentum_distribution(psi, np.linspace(-1.0, 1.0, 8001))
    a = probability_momentum(coarse, Interval(-1.0, 1.0))
    b = probability_momentum(fine, Interval(-1.0, 1.0))
    assert 0.0 < a < 1.0
    assert a == pytest.approx(b, abs=1e-6)


def test_probability_position():
    g = Grid(Interval(0.0, PI), 2000)
    psi = well_state(0, g)
    assert probability_position(psi, Interval(-5.0, 5.0)) == pytest.approx(1.0, abs=1e-10)
    assert probability_position(psi, Interval(0.0, PI / 2.0)) == pytest.approx(
        0.5, abs=1e-8
    )
    assert probability_position(psi, Interval(5.0, 6.0)) == 0.0
    left = probability_position(psi, Interval(0.0, 1.1))
    right = probability_position(psi, Interval(1.1, PI))
    assert left + right == pytest.approx(1.0, abs=1e-10)


def test_uncertainty_well_ground_state():
    g = Grid(Interval(0.0, PI), 2000)
    psi = well_state(0, g)
    res = uncertainty_product(psi)
    expected_dq = math.sqrt(PI**2 / 12.0 - 0.5)
    assert res.dq == pytest.approx(expected_dq, abs=1e-8)
    assert res.dp == pytest.approx(1.0, abs=1e-10)
    assert res.product == pytest.approx(expected_dq, abs=1e-6)
    assert res.product >= 0.5


def test_uncertainty_eigenstate_dp_exact():
    g = Grid(Interval(0.0, PI), 1500)
    for n in (0, 1, 3, 6):
        res = uncertainty_product(well_state(n, g))
        assert abs(res.dp - (n + 1)) <= 1e-8


def test_uncertainty_gaussian_near_minimum():
    g = Grid(Interval(0.0, PI), 3000)
    psi = gaussian_packet(g, PI / 2.0, 0.15, 4.0)
    res = uncertainty_product(psi)
    assert res.product == pytest.approx(0.5, abs=1e-3)


def test_translation_covariance():
    # shifting the support multiplies ft by a pure phase: density unchanged
    sigma, k0 = 0.3, 2.0
    shift = 0.7
    g1 = Grid(Interval(0.0, PI), 800)
    g2 = Grid(Interval(shift, PI + shift), 800)

    def packet_on(grid, center):
        return gaussian_packet(grid, center, sigma, k0)

    p = np.linspace(-15.0, 15.0, 301)
    f1 = packet_on(g1, PI / 2.0)
    f2 = packet_on(g2, PI / 2.0 + shift)
    t1 = line_fourier_transform(f1, p)
    t2 = line_fourier_transform(f2, p)
    # shifting a momentum-k0 packet also contributes a global phase
    np.testing.assert_allclose(
        t2, np.exp(1j * k0 * shift) * t1 * np.exp(-1j * p * shift), atol=1e-10
    )
    d1 = momentum_distribution(f1, p).density
    d2 = momentum_distribution(f2, p).density
    np.testing.assert_allclose(d1, d2, atol=1e-10)


def test_momentum_distribution_requires_normalized():
    g = Grid(Interval(0.0, PI), 100)
    bad = WaveFunction(grid=g, values=2.0 * well_state(0, g).values)
    with pytest.raises(DomainError):
        momentum_distribution(bad, np.array([0.0]))
