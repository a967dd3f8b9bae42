import numpy as np
import pytest

import dcnls.dynamics as dy
from dcnls.errors import DomainError
from dcnls.functionals import DD, FF, evaluate
from dcnls.grids import BoxField, BoxGrid, RadialField, RadialGrid


def box_gaussian(grid, amp=0.5, width=1.0):
    xs = grid.coords()
    r2 = sum(x**2 for x in xs)
    return BoxField(grid, amp * np.exp(-r2 / (2.0 * width**2)).astype(complex))


@pytest.fixture(scope="module")
def small_box():
    return BoxGrid(3, 8.0, 32)


def test_cutoff_profile_shape():
    # chi(y) = |y|^2 inside the unit ball, 0 beyond radius 2
    q = np.array([0.0, 0.5, 1.0, 2.0, 2.5])
    rho = dy.chi_profile(q)
    assert rho[0] == 0.0
    assert rho[1] == pytest.approx(0.25, rel=1e-14)
    assert rho[2] == pytest.approx(1.0, rel=1e-14)
    assert rho[3] == 0.0 and rho[4] == 0.0


def test_cutoff_profile_is_c4():
    # the transition polynomial joins with four continuous derivatives,
    # otherwise the surface terms in the double Laplacian are distributional
    eps = 1e-9
    for joint in (1.0, 2.0):
        for k in range(5):
            left = dy.chi_profile(np.array([joint - eps]), k)[0]
            right = dy.chi_profile(np.array([joint + eps]), k)[0]
            # the jump of a continuous derivative shrinks with eps times
            # the next derivative, which reaches O(1e4) for k = 4
            assert abs(left - right) < 1e-3, (joint, k)


def test_free_evolution_is_unitary(small_box):
    u = box_gaussian(small_box)
    v = dy.free_evolve(u, 0.7)
    assert v.norm_sq() == pytest.approx(u.norm_sq(), rel=1e-13)
    assert v.grad_norm_sq() == pytest.approx(u.grad_norm_sq(), rel=1e-12)
    back = dy.free_evolve(v, -0.7)
    assert np.max(np.abs(back.values - u.values)) < 1e-13


def test_local_virial_approximates_second_moment(small_box):
    # with the cutoff scaled past the support, z_R is the second moment
    u = box_gaussian(small_box, amp=1.0, width=0.5)
    z, dz = dy.local_virial(u, R=3.5)
    xs = small_box.coords()
    r2 = sum(x**2 for x in xs)
    moment = float(np.sum(r2 * np.abs(u.values) ** 2)) * small_box.cell_volume
    assert z == pytest.approx(moment, rel=1e-6)
    assert abs(dz) < 1e-12  # real data has no radial current


def test_virial_rhs_reduces_to_8K(small_box):
    u = box_gaussian(small_box, amp=1.0, width=0.5)
    rhs = dy.virial_rhs(u, FF, R=3.5)
    k = evaluate(u, FF).virial_K
    # the error term is analytically negligible here; what remains is the
    # quadrature floor of its surface integrals on a 32-cube
    assert rhs == pytest.approx(8.0 * k, rel=2e-3)


def test_evolve_conserves_on_short_run(small_box):
    u = box_gaussian(small_box)
    cfg = dy.SolverConfig(dt=2e-3, t_end=0.1, checkpoint_every=10)
    traj = dy.evolve(u, FF, cfg)
    rep = dy.conservation_report(traj)
    # the dealias mask sheds a little mass at this coarse resolution
    assert rep.mass_drift < 1e-7
    assert rep.energy_drift < 2e-6
    assert rep.momentum_drift < 1e-12


def test_schemes_agree(small_box):
    grid = RadialGrid(3, 12.0, 512)
    u = RadialField(grid, 0.5 * np.exp(-grid.nodes**2 / 2.0))
    cfg_cn = dy.SolverConfig(dt=1e-3, t_end=0.05, scheme="crank_nicolson")
    traj = dy.evolve(u, FF, cfg_cn)
    rep = dy.conservation_report(traj)
    # CN conserves mass to rounding
    assert rep.mass_drift < 1e-11


def test_boost_requires_lattice_frequency(small_box):
    u = box_gaussian(small_box)
    cfg = dy.SolverConfig(dt=1e-2, t_end=0.05)
    with pytest.raises(DomainError):
        dy.galilean_test(u, np.array([0.123, 0.0, 0.0]), FF, cfg)


def test_galilean_free_flow_covariant(small_box):
    u = box_gaussian(small_box)
    xi = np.array([2.0 * np.pi / (2.0 * small_box.L) * 2, 0.0, 0.0])
    # no dealiasing: the mask would truncate the boosted spectrum at a
    # different place than the unboosted one
    cfg = dy.SolverConfig(dt=1e-3, t_end=0.05, dealias=False)
    rep = dy.galilean_test(u, xi, None, cfg)
    assert rep.h1_mismatch < 1e-6
    assert rep.boost_energy_residual < 1e-12


def test_solver_config_validation():
    with pytest.raises(DomainError):
        dy.SolverConfig(dt=-1e-3, t_end=1.0)
    with pytest.raises(DomainError):
        dy.SolverConfig(dt=1e-3, t_end=1.0, scheme="euler")


def test_virial_identity_requires_matching_radius(small_box):
    u = box_gaussian(small_box)
    cfg = dy.SolverConfig(dt=2e-3, t_end=0.05, virial_radius=3.0)
    traj = dy.evolve(u, FF, cfg)
    with pytest.raises(DomainError):
        dy.virial_identity_check(traj, R=2.0)


def test_classify_small_data_disperses(small_box):
    u = box_gaussian(small_box, amp=0.8)
    cfg = dy.SolverConfig(dt=4e-3, t_end=1.5, checkpoint_every=25)
    res = dy.classify(u, DD, cfg, eps_scatter=0.6)
    assert res.verdict == "scatter_proxy"
