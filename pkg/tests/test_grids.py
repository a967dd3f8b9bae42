import numpy as np
import pytest

from dcnls.grids import (
    BoxField,
    BoxGrid,
    RadialField,
    RadialGrid,
    radial_derivative,
    radial_laplacian_banded,
    sphere_area,
)

# Gaussian reference values at d = 3: for u = exp(-r^2/2),
#   int |u|^2       = pi^(3/2)
#   int |grad u|^2  = (3/2) pi^(3/2)
GAUSS_MASS = np.pi**1.5
GAUSS_GRAD = 1.5 * np.pi**1.5


def test_sphere_area_d3():
    assert sphere_area(3) == pytest.approx(4.0 * np.pi, rel=1e-14)


def test_radial_quadrature_gaussian(radial_gaussian):
    assert radial_gaussian.norm_sq() == pytest.approx(GAUSS_MASS, rel=1e-8)
    assert radial_gaussian.grad_norm_sq() == pytest.approx(GAUSS_GRAD, rel=1e-6)


def test_box_quadrature_gaussian(box_gaussian):
    assert box_gaussian.norm_sq() == pytest.approx(GAUSS_MASS, rel=1e-10)
    assert box_gaussian.grad_norm_sq() == pytest.approx(GAUSS_GRAD, rel=1e-10)


def test_radial_laplacian_gaussian(radial_grid):
    # closed form: lap exp(-r^2) = (4 r^2 - 6) exp(-r^2)
    r = radial_grid.nodes
    u = RadialField(radial_grid, np.exp(-(r**2)))
    expected = (4.0 * r**2 - 6.0) * np.exp(-(r**2))
    assert np.max(np.abs(np.real(u.laplacian()) - expected)) < 1e-8


def test_radial_derivative_convergence():
    # the origin closure mirrors the samples, so use an even profile
    errs = []
    for n in (512, 1024):
        g = RadialGrid(3, 10.0, n)
        r = g.nodes
        du = radial_derivative(np.cos(r), g.dr)
        errs.append(np.max(np.abs(du + np.sin(r))))
    # default accuracy is at least 4th order
    assert errs[0] / errs[1] > 12.0


def test_banded_laplacian_matches_closed_form(radial_grid):
    # tridiagonal (2nd order) operator in solve_banded layout
    ab = radial_laplacian_banded(radial_grid)
    r = radial_grid.nodes
    u = np.exp(-(r**2))
    out = ab[1] * u
    out[:-1] += ab[0, 1:] * u[1:]
    out[1:] += ab[2, :-1] * u[:-1]
    expected = (4.0 * r**2 - 6.0) * np.exp(-(r**2))
    assert np.max(np.abs(out - expected)) < 2e-3


def test_box_parseval_consistency(box_grid):
    rng = np.random.default_rng(7)
    vals = rng.normal(size=(box_grid.n,) * 3) + 1j * rng.normal(size=(box_grid.n,) * 3)
    u = BoxField(box_grid, vals)
    uh = u.fft()
    via_fourier = np.sum(np.abs(uh) ** 2) / box_grid.n**3 * box_grid.cell_volume
    assert u.norm_sq() == pytest.approx(via_fourier, rel=1e-12)


def test_box_momentum_of_plane_wave(box_grid):
    # u = e^{i k x} has momentum k * mass
    k = 2.0 * np.pi / (2.0 * box_grid.L)
    xs = box_grid.coords()
    u = BoxField(box_grid, np.exp(1j * k * (xs[0] + 0.0 * xs[1] + 0.0 * xs[2])))
    p = u.momentum()
    assert p[0] == pytest.approx(k * u.norm_sq(), rel=1e-12)
    assert abs(p[1]) < 1e-12 and abs(p[2]) < 1e-12


def test_grid_validation():
    with pytest.raises(ValueError):
        RadialGrid(2, 10.0, 128)
    with pytest.raises(ValueError):
        BoxGrid(3, 8.0, 48)  # not a power of two
    with pytest.raises(ValueError):
        RadialField(RadialGrid(3, 10.0, 64), np.ones(65))


def test_fields_reject_non_finite(radial_grid):
    vals = np.ones(radial_grid.n)
    vals[3] = np.nan
    with pytest.raises(ValueError):
        RadialField(radial_grid, vals)
