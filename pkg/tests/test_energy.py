import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sta_additivity import convention
from sta_additivity.algebra import Multivector, basis_blade, grade_project
from sta_additivity.cylinder import AnalyticScenario
from sta_additivity.energy import (check_riesz_identity, component_tensor,
                                   cross_density, cross_rows, cross_tensor,
                                   density_rows, divergence_density,
                                   divergence_residual, energy_momentum,
                                   riesz_density)
from sta_additivity.errors import GradeError
from sta_additivity.fields import DomainSpec, PulseSpec, sample_pulses, static_state

ETA = np.array([1.0, -1.0, -1.0, -1.0])
slots = arrays(np.float64, 6, elements=st.floats(-2, 2, allow_nan=False))


def mv(biv):
    return convention.to_multivector(np.asarray(biv, dtype=float))


def em(biv):
    biv = np.asarray(biv, dtype=float)
    return convention.electric(biv), convention.magnetic(biv)


def upper_components(vec):
    """T^a . theta^b for b = 0..3 from the theta^b coefficients."""
    return np.array([vec[1 << b] * ETA[b] for b in range(4)])


# --- examples -------------------------------------------------------------

def test_unit_electric_field():
    F = basis_blade([0, 1])  # E = (1, 0, 0)
    T0 = riesz_density(F, 0)
    assert isinstance(T0, Multivector)
    assert T0[1] == pytest.approx(0.5) and np.count_nonzero(T0.coeffs) == 1
    T = component_tensor(F)
    np.testing.assert_allclose(np.diag(T), [0.5, -0.5, 0.5, 0.5], atol=1e-15)
    assert np.einsum("aa,a->", T, ETA) == pytest.approx(0.0, abs=1e-15)


def test_zero_field_has_no_energy():
    assert not np.any(riesz_density(np.zeros(16), 2))


def test_energy_and_poynting_oracle():
    E, B = np.array([1.0, 2.0, -0.5]), np.array([0.3, -1.0, 2.0])
    F = mv(convention.from_em(E, B))
    T = np.array([upper_components(riesz_density(F, a)) for a in range(4)])
    assert T[0, 0] == pytest.approx(0.5 * (E @ E + B @ B))
    np.testing.assert_allclose(T[0, 1:], np.cross(E, B), atol=1e-14)
    # Maxwell stress: T^ij = -E_iE_j - B_iB_j + 1/2 delta_ij (E^2 + B^2)
    stress = -np.outer(E, E) - np.outer(B, B) + 0.5 * np.eye(3) * (E @ E + B @ B)
    np.testing.assert_allclose(T[1:, 1:], stress, atol=1e-14)


def test_cross_term_oracle():
    b1, b2 = np.array([1.0, 0, 0.5, 0, 2.0, -1]), np.array([0.2, -1, 0, 1.5, 0, 0.3])
    (E1, B1), (E2, B2) = em(b1), em(b2)
    K0 = upper_components(cross_density(mv(b1), mv(b2), 0))
    assert K0[0] == pytest.approx(E1 @ E2 + B1 @ B2)
    np.testing.assert_allclose(K0[1:], np.cross(E1, B2) + np.cross(E2, B1), atol=1e-14)


def test_counter_propagating_pulses_do_not_interfere_pointwise():
    # E1.E2 + B1.B2 = 0 for any polarizations of opposite null pulses
    p = PulseSpec(center_z=0.0, polarization_angle=20.0)
    q = PulseSpec(center_z=0.0, direction="-z", polarization_angle=75.0)
    d = DomainSpec(1.0, 1.0, -2.0, 2.0, 4, 4, 32)
    s1, s2 = sample_pulses([p], d, 0.0), sample_pulses([q], d, 0.0)
    assert np.max(np.abs(cross_rows(s1.biv, s2.biv))) <= 1e-15


def test_scaling_is_quadratic():
    F = mv([0.3, -1.0, 0.2, 0.7, 0.1, -0.4])
    for a in range(4):
        np.testing.assert_allclose(riesz_density(3.0 * F, a), 9.0 * riesz_density(F, a),
                                   rtol=1e-14, atol=1e-15)


def test_non_bivector_rejected():
    with pytest.raises(GradeError):
        riesz_density(basis_blade([0]), 0)
    with pytest.raises(GradeError):
        cross_density(basis_blade([0, 1]), basis_blade([0, 1, 2]), 0)
    with pytest.raises(GradeError):
        component_tensor(np.ones(16))


# --- properties -----------------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(slots, arrays(np.float64, 4, elements=st.floats(-2, 2, allow_nan=False)))
def test_riesz_identity(biv, n):
    v = np.zeros(16)
    v[[1, 2, 4, 8]] = n
    assert check_riesz_identity(v, mv(biv)) <= 1e-12


@settings(max_examples=80, deadline=None)
@given(slots)
def test_tensor_symmetric_traceless_and_dual_route(biv):
    F = mv(biv)
    T = component_tensor(F)
    np.testing.assert_allclose(T, T.T, atol=1e-12)
    assert abs(np.einsum("aa,a->", T, ETA)) <= 1e-12
    riesz = np.array([upper_components(riesz_density(F, a)) for a in range(4)])
    np.testing.assert_allclose(component_tensor(F, upper=True), riesz, atol=1e-12)


@settings(max_examples=80, deadline=None)
@given(slots)
def test_dominant_energy(biv):
    T = component_tensor(mv(biv), upper=True)
    assert T[0, 0] >= np.linalg.norm(T[0, 1:]) - 1e-12


@settings(max_examples=80, deadline=None)
@given(slots, slots, st.integers(0, 3))
def test_cross_term_is_pure_one_form_and_polarizes(b1, b2, a):
    F, G = mv(b1), mv(b2)
    K = cross_density(F, G, a)
    assert np.max(np.abs(K - grade_project(K, 1))) <= 1e-12
    np.testing.assert_allclose(K, cross_density(G, F, a), atol=1e-12)
    pol = riesz_density(F + G, a) - riesz_density(F, a) - riesz_density(G, a)
    np.testing.assert_allclose(K, pol, atol=1e-12)
    np.testing.assert_allclose(upper_components(K), cross_tensor(F, G, upper=True)[a],
                               atol=1e-12)


# --- grid routes ----------------------------------------------------------

def test_grid_routes_agree_with_pointwise(rng):
    b1, b2 = rng.normal(size=(2, 6, 3, 2, 2))
    dens = density_rows(b1)
    cross = cross_rows(b1, b2)
    for idx in [(0, 0, 0), (2, 1, 0), (1, 1, 1)]:
        F = b1[(slice(None),) + idx]
        G = b2[(slice(None),) + idx]
        T = component_tensor(mv(F), upper=True)
        np.testing.assert_allclose(dens[(slice(None),) + idx], T[:, 0], atol=1e-13)
        K = cross_tensor(mv(F), mv(G), upper=True)
        np.testing.assert_allclose(cross[(slice(None),) + idx], K[:, 0], atol=1e-13)


def test_energy_momentum_vectors(rng):
    biv = rng.normal(size=(6, 2, 2, 2))
    em_ = energy_momentum(static_state(biv))
    assert em_.tensor.shape == (4, 4, 2, 2, 2)
    vec = em_.vectors()
    F = mv(biv[:, 1, 0, 1])
    for a in range(4):
        np.testing.assert_allclose(vec[a, 1, 0, 1], riesz_density(F, a), atol=1e-13)


# --- divergence -----------------------------------------------------------

def test_divergence_of_zero_field_is_zero():
    d = DomainSpec(1.0, 1.0, -1.0, 1.0, 4, 4, 16)
    levels = [energy_momentum(sample_pulses([], d, t)) for t in (0.0, 0.1, 0.2)]
    assert not np.any(divergence_density(levels, d))
    assert divergence_residual([sample_pulses([], d, t) for t in (0.0, 0.1)], d) == 0.0


def test_divergence_residual_is_second_order():
    scenario = AnalyticScenario([PulseSpec(center_z=-1.0, half_width=2.0)])
    res = []
    for nz in (512, 1024):
        d = DomainSpec(4.0, 4.0, -5.0, 5.0, 4, 4, nz)
        state = scenario.state_at(0.4, d)
        res.append(divergence_residual(scenario.time_levels(state, d), d))
    assert 3.5 <= res[0] / res[1] <= 4.5


def test_divergence_density_matches_residual():
    d = DomainSpec(1.0, 1.0, -5.0, 5.0, 4, 4, 64)
    scenario = AnalyticScenario([PulseSpec(center_z=-1.0, half_width=2.0)])
    states = scenario.time_levels(scenario.state_at(0.0, d), d)
    dens = divergence_density([energy_momentum(s) for s in states], d)
    assert np.max(np.abs(dens)) == pytest.approx(divergence_residual(states, d), rel=1e-12)
