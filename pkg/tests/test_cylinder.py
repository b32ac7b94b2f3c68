import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from sta_additivity.cylinder import (AnalyticScenario, CylinderSpec,
                                     EvolvedScenario, additivity_report,
                                     flux_balance, integrate_slice,
                                     neumaier_rows, neumaier_sum, overlap_time,
                                     verdict)
from sta_additivity.errors import SetupError
from sta_additivity.fields import DomainSpec, PulseSpec, profile_value

DOMAIN = DomainSpec(1.0, 1.0, -10.0, 10.0, 4, 4, 256)
P1 = PulseSpec(center_z=-5.0, half_width=2.0)
P2 = PulseSpec(center_z=5.0, half_width=2.0, direction="-z", polarization_angle=90.0)


def spec(times, domain=DOMAIN, t_end=None):
    return CylinderSpec(0.0, t_end or max(times[-1], 1.0), tuple(times), domain)


def pulse_energy(p, domain):
    # T^00 = A^2 f^2 for a null pulse, uniform across the box cross-section
    f2 = lambda z: (p.amplitude * profile_value(p.profile, np.array([(z - p.center_z) / p.half_width]))[0]) ** 2
    val, _ = quad(f2, p.center_z - p.half_width, p.center_z + p.half_width,
                  epsabs=1e-15, epsrel=1e-13, limit=200)
    return val * domain.Lx * domain.Ly


# --- compensated sums -----------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=300))
def test_neumaier_matches_fsum(values):
    exact = math.fsum(values)
    scale = max(1.0, math.fsum(abs(v) for v in values))
    assert abs(neumaier_sum(values) - exact) <= 4e-16 * scale
    rows = neumaier_rows(np.array([values, values[::-1]]))
    assert abs(rows[0] - exact) <= 4e-16 * scale and abs(rows[1] - exact) <= 4e-16 * scale


def test_neumaier_cancellation():
    assert neumaier_sum([1.0, 1e100, 1.0, -1e100]) == 2.0
    assert neumaier_rows(np.array([[1.0, 1e100, 1.0, -1e100]]))[0] == 2.0


# --- slice integrals ------------------------------------------------------

def test_integral_of_zero_and_constant():
    assert integrate_slice(np.zeros(DOMAIN.shape), DOMAIN) == 0.0
    # a unit E_x field has energy density 1/2
    assert integrate_slice(np.full(DOMAIN.shape, 0.5), DOMAIN) == pytest.approx(0.5 * 20.0, rel=1e-15)


def test_integral_shape_checked():
    with pytest.raises(ValueError):
        integrate_slice(np.zeros((3, 4, 4)), DOMAIN)


@pytest.mark.parametrize("profile", ["bump", "cosine-window"])
def test_pulse_energy_matches_quadrature(profile):
    p = PulseSpec(profile, 1.5, -1.0, 2.0)
    d = DomainSpec(1.0, 1.0, -5.0, 5.0, 4, 4, 4096)
    r = additivity_report(AnalyticScenario([p]), None, spec([0.0], d))[0]
    want = pulse_energy(p, d)
    # midpoint rule is spectrally accurate for the bump, O(h^2) for the C1 window
    tol = 1e-10 if profile == "bump" else 1e-6
    assert r.P[0] == pytest.approx(want, rel=tol)


def test_integral_independent_of_workers(rng):
    grid = rng.normal(size=DOMAIN.shape)
    ref = integrate_slice(grid, DOMAIN, 1)
    for w in (2, 8):
        assert integrate_slice(grid, DOMAIN, w) == ref


# --- scenarios ------------------------------------------------------------

def test_overlap_time():
    assert overlap_time(P1, P2) == 5.0
    assert overlap_time(P2, P1) == 5.0
    with pytest.raises(SetupError):
        overlap_time(P1, PulseSpec(center_z=3.0))
    with pytest.raises(SetupError):
        overlap_time(PulseSpec(center_z=3.0), PulseSpec(center_z=-3.0, direction="-z"))


def test_cylinder_validation():
    with pytest.raises(ValueError):
        CylinderSpec(1.0, 1.0, (1.0,), DOMAIN)
    with pytest.raises(ValueError):
        CylinderSpec(0.0, 2.0, (1.0, 0.5), DOMAIN)
    with pytest.raises(ValueError):
        CylinderSpec(0.0, 2.0, (3.0,), DOMAIN)


def test_single_field_has_no_interference():
    reports = additivity_report(AnalyticScenario([P1]), None, spec([0.0, 2.0]))
    for r in reports:
        assert r.K == (0.0, 0.0, 0.0, 0.0) and r.K_direct == (0.0, 0.0, 0.0, 0.0)
        assert r.P == r.P1 and r.P2 == (0.0, 0.0, 0.0, 0.0)


def test_additivity_through_overlap():
    reports = additivity_report(AnalyticScenario([P1]), AnalyticScenario([P2]),
                                spec([0.0, 2.5, 5.0, 7.5]))
    assert [r.t for r in reports] == [0.0, 2.5, 5.0, 7.5]
    for r in reports:
        for a in range(4):
            assert abs(r.K[a]) <= 1e-10 * r.P[0]
            assert abs(r.K[a] - r.K_direct[a]) <= 1e-12
        assert r.provenance == "analytic"
    v = verdict(reports, 1e-10, 1e-10)
    assert v.passed and v.additive and v.conserved


def test_pulse_momentum_is_null():
    r = additivity_report(AnalyticScenario([P1]), AnalyticScenario([P2]), spec([0.0]))[0]
    assert r.P1[3] == pytest.approx(r.P1[0], rel=1e-10)
    assert r.P2[3] == pytest.approx(-r.P2[0], rel=1e-10)
    assert r.P1[1] == r.P1[2] == 0.0
    assert abs(r.P[3]) <= 1e-10 * r.P[0]


def test_flux_balance():
    # slice times off the grid lattice; the resolved bump keeps its sum to 1e-10
    d = DomainSpec(1.0, 1.0, -10.0, 10.0, 4, 4, 512)
    reports = additivity_report(AnalyticScenario([P1]), None, spec([0.0, 3.01], d))
    bal = flux_balance(*reports)
    assert np.max(np.abs(bal)) <= 1e-10 * reports[0].P[0]
    np.testing.assert_allclose(flux_balance(*reports, lateral_flux=(1, 0, 0, 0)) - bal,
                               [1, 0, 0, 0])


def test_hypothesis_violations():
    wide = PulseSpec(center_z=-5.0, half_width=6.0)
    with pytest.raises(SetupError, match="leaves the box"):
        additivity_report(AnalyticScenario([wide]), None, spec([0.0]))
    with pytest.raises(SetupError, match="leaves the box"):
        additivity_report(AnalyticScenario([P1]), None, spec([0.0, 14.0]))
    touching = PulseSpec(center_z=-2.0, half_width=2.0, direction="-z")
    with pytest.raises(SetupError, match="overlap"):
        additivity_report(AnalyticScenario([P1]), AnalyticScenario([touching]), spec([0.0]))


def test_report_workers_identical():
    runs = [additivity_report(AnalyticScenario([P1]), AnalyticScenario([P2]),
                              spec([0.0, 5.0]), w) for w in (1, 2, 8)]
    assert runs[0] == runs[1] == runs[2]


# --- evolved route --------------------------------------------------------

FD_DOMAIN = DomainSpec(4.0, 4.0, -5.0, 5.0, 4, 4, 128)
Q1 = PulseSpec(center_z=-2.5, half_width=2.0)
Q2 = PulseSpec(center_z=2.5, half_width=2.0, direction="-z")


def fd_reports(nz):
    d = DomainSpec(4.0, 4.0, -5.0, 5.0, 4, 4, nz)
    return additivity_report(EvolvedScenario([Q1]), EvolvedScenario([Q2]),
                             spec([0.0, 1.25, 2.5, 3.75], d))


def test_evolved_scenario_steps_forward_only():
    sc = EvolvedScenario([Q1])
    s1 = sc.state_at(0.5, FD_DOMAIN)
    assert s1.time == pytest.approx(0.5) and s1.provenance == "evolved"
    assert sc.state_at(0.5, FD_DOMAIN) is s1
    with pytest.raises(ValueError):
        sc.state_at(0.25, FD_DOMAIN)
    with pytest.raises(ValueError):
        EvolvedScenario([Q1], dt_cfl=1.5)


def test_fdtd_additivity_small_and_shrinking():
    coarse, fine = fd_reports(128), fd_reports(256)
    v = verdict(coarse, 1e-3, 1e-3, 1e-12 * coarse[0].P[0])
    assert v.additivity <= 1e-3 and v.passed
    ratio = v.additivity / verdict(fine, 1e-3, 1e-3).additivity
    assert 3.5 <= ratio <= 4.5


def test_verdict_flags_failures():
    reports = additivity_report(AnalyticScenario([P1]), None, spec([0.0]))
    assert not verdict(reports, -1.0, 1e-10).passed
    v = verdict(reports, 1e-10, 1e-10, route_tol=-1.0)
    assert not v.additive and v.conserved
