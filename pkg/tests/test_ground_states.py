import numpy as np
import pytest

from dcnls.errors import SolverError
from dcnls.functionals import FD, FF, evaluate, p_energy
from dcnls.grids import RadialField, RadialGrid
import dcnls.ground_states as gs

# frozen reference values at d = 3, from independent quadrature/shooting
# oracles at doubled resolution
S_REF = 5.477904089531332
HSTAR_REF = 4.273664068323042
MQ_REF = 63.78311578432749
CGN_REF = 9.578299310268592


def test_aubin_talenti_closed_form():
    r = np.array([0.0, 1.0, np.sqrt(3.0)])
    w = gs.aubin_talenti_values(r, 3)
    assert w[0] == 1.0
    assert w[2] == pytest.approx(2.0 ** (-0.5), rel=1e-15)


def test_sobolev_constant_and_static_energy():
    assert gs.sobolev_constant(3) == pytest.approx(S_REF, rel=1e-10)
    assert gs.hstar_w(3) == pytest.approx(HSTAR_REF, rel=1e-10)
    # the optimizer saturates: H*(W) = S^(3/2)/3
    assert gs.sobolev_constant(3) ** 1.5 == pytest.approx(
        3.0 * gs.hstar_w(3), rel=1e-12
    )


def test_aubin_talenti_on_grid_residual():
    state = gs.aubin_talenti(RadialGrid(3, 200.0, 4096))
    assert state.residual_ode < 1e-6
    rep = evaluate(state.field, FF)
    # the static Hamiltonian of W is H*(W) up to tail truncation
    # the 1/r far tail converges slowly in the gradient integral
    assert rep.hstar == pytest.approx(HSTAR_REF, rel=3e-2)


def test_critical_mass_and_gn_constant():
    assert gs.critical_mass(3) == pytest.approx(MQ_REF, rel=1e-8)
    assert gs.gn_constant(3) == pytest.approx(CGN_REF, rel=1e-8)
    # C_GN = (3/5) M(Q)^(2/3)
    assert gs.gn_constant(3) == pytest.approx(
        0.6 * gs.critical_mass(3) ** (2.0 / 3.0), rel=1e-12
    )


def test_fd_frequency_ceiling():
    assert gs.omega_max_fd(3) == pytest.approx(
        (2.0 / 3.0) * 0.6**1.5, rel=1e-15
    )


def test_explicit_near_critical_bound_value():
    bound = gs.mc_bound_near_critical(0.95, 3, MQ_REF)
    assert bound == pytest.approx(0.4618127437850119, rel=1e-12)


def test_solve_Q_mass_and_residual():
    state = gs.solve_Q(RadialGrid(3, 40.0, 4096))
    assert state.residual_ode < 1e-8
    assert state.field.norm_sq() == pytest.approx(MQ_REF, rel=1e-6)
    assert state.amp == pytest.approx(4.1917233, rel=1e-4)


@pytest.mark.parametrize(
    "omega,regime", [(0.04, FF), (0.16, FF), (0.1, FD), (0.25, FD)]
)
def test_soliton_pohozaev(omega, regime):
    sol = gs.solve_soliton(omega, regime)
    assert sol.omega == pytest.approx(omega, rel=1e-12)
    assert max(sol.pohozaev) < 1e-5
    assert sol.residual_ode < 1e-5
    # profile is positive and decaying
    vals = np.real(sol.field.values)
    assert vals[0] > 0 and vals[-1] < 1e-8 * vals[0]


def test_fixed_amp_family_mass_monotone():
    # amplitudes must exceed the single-power ground-state amplitude 4.19
    shots = [gs.shoot_profile_fixed_amp(a, 1.0, 3) for a in (5.0, 6.0, 8.0)]
    masses = [s.mass for s in shots]
    assert masses[0] > masses[1] > masses[2]


def test_soliton_undecayed_tail_rejected():
    # a grid too small for the slow exp(-sqrt(omega) r) tail is refused
    with pytest.raises(SolverError):
        gs.solve_soliton(0.01, FF, grid=RadialGrid(3, 12.0, 1024))


def test_threshold_curve_interpolation_domain():
    from dcnls.errors import DomainError

    sample = gs.CurveSample(
        c=1.0, value=2.0, omega=0.1, minimizer=None,
        residual_ode=0.0, pohozaev=(0.0, 0.0, 0.0),
    )
    sample2 = gs.CurveSample(
        c=2.0, value=1.0, omega=0.2, minimizer=None,
        residual_ode=0.0, pohozaev=(0.0, 0.0, 0.0),
    )
    curve = gs.ThresholdCurve(FF, "m_c", (sample, sample2), mass_q=MQ_REF)
    assert curve.interpolate(1.5) == pytest.approx(1.5)
    with pytest.raises(DomainError):
        curve.interpolate(3.0)
