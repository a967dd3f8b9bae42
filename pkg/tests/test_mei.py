import numpy as np
import pytest

from dcnls.errors import PreconditionError
from dcnls.functionals import DD, DF, FD, FF
from dcnls.grids import RadialField, RadialGrid
from dcnls.mei import (
    MEIRegion,
    admissible,
    fd_closed_form,
    mei_drift,
    mei_of,
    mei_properties_check,
    mei_value,
    region_for,
)

M_CRIT = 60.0
H_CRIT = 4.0


@pytest.fixture(scope="module")
def ff_region():
    # synthetic strictly decreasing curve standing in for the threshold
    c = np.linspace(5.0, 55.0, 6)
    h = H_CRIT * (1.0 - c / M_CRIT) ** 1.5
    return region_for(FF, m_crit=M_CRIT, h_crit=H_CRIT, curve_c=c, curve_h=h)


def test_zero_point_has_zero_indicator(ff_region):
    assert mei_value(0.0, 0.0, ff_region).value == 0.0


def test_outside_is_infinite(ff_region):
    assert mei_value(M_CRIT + 1.0, 0.0, ff_region).value == np.inf
    assert mei_value(10.0, 10.0, ff_region).value == np.inf
    assert mei_value(10.0, 10.0, ff_region).distance == 0.0


def test_indicator_blows_up_towards_boundary(ff_region):
    c = 30.0
    hs = ff_region.mc_at(c) * np.array([0.5, 0.9, 0.99, 0.999])
    vals = [mei_value(c, h, ff_region).value for h in hs]
    assert np.all(np.diff(vals) > 0)
    assert vals[-1] > 100 * vals[0]


def test_monotone_in_both_arguments(ff_region):
    base = mei_value(20.0, 0.5, ff_region).value
    assert mei_value(25.0, 0.5, ff_region).value > base
    assert mei_value(20.0, 0.8, ff_region).value > base


def test_fd_closed_form_matches_generic():
    region = region_for(FD, m_crit=M_CRIT)
    worst = 0.0
    for c in np.linspace(0.5, 55.0, 23):
        for h in np.linspace(-3.0, 6.0, 19):
            generic = mei_value(float(c), float(h), region).value
            closed = fd_closed_form(float(c), float(h), M_CRIT)
            worst = max(worst, abs(generic - closed))
    assert worst < 1e-10


def test_dd_degenerates_to_energy():
    region = region_for(DD)
    assert mei_value(7.0, 3.25, region).value == 3.25


def test_df_quadrant_distance():
    region = region_for(DF, h_crit=H_CRIT)
    # below the cut at positive mass: vertical distance
    assert mei_value(2.0, 1.0, region).distance == pytest.approx(H_CRIT - 1.0)
    # negative mass is unreachable for fields, but the geometry is defined
    assert mei_value(-3.0, H_CRIT + 1.0, region).distance == pytest.approx(3.0)


def test_admissible_and_properties(ff_region, radial_grid):
    rng = np.random.default_rng(5)
    fields = []
    r = radial_grid.nodes
    for _ in range(40):
        amp = rng.uniform(0.05, 0.6)
        width = rng.uniform(0.7, 2.0)
        fields.append(RadialField(radial_grid, amp * np.exp(-(r**2) / (2 * width**2))))
    fields.append(RadialField(radial_grid, np.zeros(radial_grid.n)))
    report = mei_properties_check(ff_region, fields)
    assert report.ok
    assert report.n_fields == 41


def test_mei_drift_constant_series(ff_region):
    masses = np.full(9, 20.0)
    energies = np.full(9, 0.5)
    assert mei_drift(masses, energies, ff_region) == 0.0


def test_mei_drift_rejects_exit(ff_region):
    with pytest.raises(PreconditionError):
        mei_drift(np.array([20.0, 61.0]), np.array([0.5, 0.5]), ff_region)


def test_region_requires_its_data():
    with pytest.raises(PreconditionError):
        MEIRegion(FF, m_crit=M_CRIT)  # no curve
    with pytest.raises(PreconditionError):
        MEIRegion(DF)  # no h_crit
