import math

import numpy as np
import pytest

from spectra.core import (
    Dirichlet,
    DomainError,
    GeneralU,
    Grid,
    Interval,
    QuasiPeriodic,
    UnitaryMatrix2,
    inner_product,
)
from spectra.closed_form import infinite_well_spectrum, kinetic_spectrum
from spectra.discrete_solver import (
    CalogeroPotential,
    CentrifugalPotential,
    PeriodicCellPotential,
    ZeroPotential,
    assemble,
    convergence_report,
    eigensolve,
    half_line_grid,
    symmetric_grid,
)
from spectra.direct_integral import cell_grid

PI = math.pi


def test_assemble_dirichlet_stencil():
    g = Grid(Interval(0.0, PI), 3)
    op = assemble(g, ZeroPotential(), Dirichlet())
    h = PI / 4.0
    m = op.matrix()
    expected = (1.0 / h**2) * np.array(
        [[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]
    )
    np.testing.assert_allclose(m, expected)
    assert op.hermiticity_defect() == 0.0


def test_assemble_quasi_periodic_corners():
    g = cell_grid(8)
    alpha = 0.9
    op = assemble(g, ZeroPotential(), QuasiPeriodic(alpha))
    m = op.matrix()
    base = assemble(g, ZeroPotential(), Dirichlet()).matrix()
    diff = m - base
    h = g.h
    assert abs(abs(diff[0, -1]) - 1.0 / h**2) < 1e-9
    assert abs(abs(diff[-1, 0]) - 1.0 / h**2) < 1e-9
    diff[0, -1] = diff[-1, 0] = 0.0
    assert np.max(np.abs(diff)) == 0.0
    for a in np.random.default_rng(3).uniform(0, 2 * PI, 5):
        opa = assemble(g, ZeroPotential(), QuasiPeriodic(float(a)))
        assert opa.hermiticity_defect() <= 1e-12


def test_assemble_errors():
    g = Grid(Interval(0.0, PI), 16)
    with pytest.raises(DomainError):
        assemble(g, ZeroPotential(), QuasiPeriodic(0.5))  # needs a wrap grid
    with pytest.raises(DomainError):
        assemble(
            g,
            ZeroPotential(),
            GeneralU(UnitaryMatrix2.from_array(-np.eye(2))),
        )
    odd = Grid(Interval(-1.0, 1.0), 9)  # x = 0 is the middle sample
    with pytest.raises(DomainError):
        assemble(odd, CalogeroPotential(2.0), Dirichlet())
    with pytest.raises(DomainError):
        PeriodicCellPotential(lambda x: np.ones_like(np.asarray(x, dtype=float)))


def test_eigensolve_dirichlet_exact_discrete_value():
    g = Grid(Interval(0.0, PI), 99)
    spec = eigensolve(assemble(g, ZeroPotential(), Dirichlet()), 5)
    h = g.h
    exact_discrete = (4.0 / h**2) * np.sin(np.arange(1, 6) * h / 2.0) ** 2
    np.testing.assert_allclose(spec.eigenvalues, exact_discrete, rtol=1e-12)
    assert abs(spec.eigenvalues[0] - 1.0) < 1e-4


def test_eigensolve_quasi_periodic_lowest():
    spec = eigensolve(
        assemble(cell_grid(2000), ZeroPotential(), QuasiPeriodic(PI / 2.0)), 3
    )
    assert abs(spec.eigenvalues[0] - 0.25) / 0.25 < 1e-3
    exact = kinetic_spectrum(PI / 2.0, (-2, 2)).eigenvalues[:3]
    np.testing.assert_allclose(spec.eigenvalues, exact, rtol=1e-3)


def test_eigensolve_calogero_levels():
    op = assemble(half_line_grid(12.0, 2400), CalogeroPotential(2.0), Dirichlet())
    spec = eigensolve(op, 2)
    assert abs(spec.eigenvalues[0] - 5.0) / 5.0 < 1e-2
    assert abs(spec.eigenvalues[1] - 9.0) / 9.0 < 1e-2


def test_eigensolve_orthonormal_vectors():
    op = assemble(cell_grid(300), ZeroPotential(), QuasiPeriodic(1.1))
    spec = eigensolve(op, 6)
    for i in range(6):
        for j in range(i, 6):
            ip = inner_product(spec.state(i), spec.state(j))
            assert abs(ip - (1.0 if i == j else 0.0)) < 1e-8
    with pytest.raises(DomainError):
        eigensolve(op, 301)


def test_convergence_order_dirichlet():
    oracle = infinite_well_spectrum(4)
    grids = [Grid(Interval(0.0, PI), n) for n in (249, 499, 999)]
    rep = convergence_report(ZeroPotential(), Dirichlet(), oracle, grids, 5)
    assert np.all(np.diff(rep.max_rel_errors) < 0)
    for order in rep.orders:
        assert order == pytest.approx(2.0, abs=0.3)


def test_convergence_order_quasi_periodic():
    oracle = kinetic_spectrum(0.0, (-3, 3))
    grids = [cell_grid(n) for n in (200, 400, 800)]
    rep = convergence_report(ZeroPotential(), QuasiPeriodic(0.0), oracle, grids, 5)
    for order in rep.orders:
        assert order == pytest.approx(2.0, abs=0.3)


def test_convergence_calogero_monotone():
    from spectra.closed_form import CalogeroParams, calogero_spectrum

    oracle = calogero_spectrum(CalogeroParams(2.0), 1)
    grids = [half_line_grid(12.0, n) for n in (600, 1200)]
    rep = convergence_report(CalogeroPotential(2.0), Dirichlet(), oracle, grids, 2)
    assert rep.max_rel_errors[1] < rep.max_rel_errors[0]


def test_mirrored_calogero_near_degenerate_pairs():
    grid = symmetric_grid(12.0, 600)
    spec = eigensolve(assemble(grid, CalogeroPotential(2.0), Dirichlet()), 6)
    ev = spec.eigenvalues
    for j in range(0, 6, 2):
        assert abs(ev[j + 1] - ev[j]) <= 1e-6 * ev[j]


def test_plane_rotator_degenerate_pairs():
    spec = eigensolve(assemble(cell_grid(600), ZeroPotential(), QuasiPeriodic(0.0)), 7)
    ev = spec.eigenvalues
    assert abs(ev[0]) < 1e-9  # the zero mode is simple
    for j in range(1, 7, 2):
        assert abs(ev[j + 1] - ev[j]) <= 1e-9 * max(1.0, ev[j])


def test_projector_commutation_mirrored():
    # restricting an eigenvector to x > 0 leaves a near-eigenvector whose
    # Rayleigh residual is controlled by the cross-barrier coupling
    grid = symmetric_grid(12.0, 600)
    op = assemble(grid, CalogeroPotential(2.0), Dirichlet())
    spec = eigensolve(op, 4)
    x = grid.points
    pos = x > 0
    center = grid.n // 2
    for i in range(4):
        v = spec.vectors[:, i]
        chi_v = np.where(pos, v, 0.0)
        nrm = math.sqrt(float(np.sum(np.abs(chi_v) ** 2)))
        if nrm < 1e-8:
            continue
        resid = op.apply(chi_v) - spec.eigenvalues[i] * chi_v
        coupling = (1.0 / grid.h**2) * max(
            abs(v[center - 1]), abs(v[center])
        )
        assert math.sqrt(float(np.sum(np.abs(resid) ** 2))) <= 10.0 * coupling + 1e-9


def test_convergence_report_errors():
    oracle = infinite_well_spectrum(2)
    grids = [Grid(Interval(0.0, PI), n) for n in (99, 199)]
    with pytest.raises(DomainError):
        convergence_report(ZeroPotential(), Dirichlet(), oracle, grids, 5)  # oracle short
    with pytest.raises(DomainError):
        convergence_report(ZeroPotential(), Dirichlet(), oracle, grids[:1], 2)
    with pytest.raises(DomainError):
        convergence_report(ZeroPotential(), Dirichlet(), oracle, grids[::-1], 2)


def test_unitary_matrix_validation():
    from spectra.core import UnitaryMatrix2

    with pytest.raises(DomainError):
        UnitaryMatrix2.from_array(np.array([[1.0, 0.2], [0.0, 1.0]]))


def test_centrifugal_potential_values():
    g = Grid(Interval(0.0, 2.0), 99)
    pot = CentrifugalPotential(3)
    np.testing.assert_allclose(pot.evaluate(g.points), 6.0 / g.points**2)
    with pytest.raises(DomainError):
        CentrifugalPotential(1)
