import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from abforce import CODATA2018, Scenario, SingularPointError
from abforce.fields import (
    ChargeKinematics,
    closure_field_magnitude,
    coulomb_E,
    dipole_B,
    exact_charge_fields,
    motional_electric_dipole,
    simplified_charge_B,
)

C = CODATA2018
K = 1 / (4 * math.pi * C.eps0)

vectors = st.tuples(*[st.floats(-10, 10, allow_nan=False)] * 3).map(np.array).filter(
    lambda v: np.linalg.norm(v) > 1e-3)


@settings(max_examples=200, deadline=None)
@given(r=vectors, direction=vectors, beta=st.floats(1e-6, 0.9))
def test_exact_fields_orthogonality(r, direction, beta):
    v = beta * C.c * direction / np.linalg.norm(direction)
    f = exact_charge_fields(ChargeKinematics(-C.e, v, r * 1e-6))
    # natural field scale |v||E|/c^2; |B| itself is rounding noise when r is parallel to v
    b_scale = np.linalg.norm(v) * np.linalg.norm(f.E) / C.c**2
    assert abs(f.E @ f.B) <= 1e-12 * np.linalg.norm(f.E) * b_scale + 1e-300
    assert abs(v @ f.B) <= 1e-12 * np.linalg.norm(v) * b_scale + 1e-300


def test_exact_field_transverse_enhancement():
    beta, r = 0.05, 1e-6
    v = np.array([0.0, 0.0, beta * C.c])
    f = exact_charge_fields(ChargeKinematics(C.e, v, np.array([0.0, r, 0.0])))
    gamma = 1 / math.sqrt(1 - beta**2)
    assert np.linalg.norm(f.E) == pytest.approx(K * C.e * gamma / r**2, rel=1e-14)
    # along the line of motion the field is reduced by 1/gamma^2
    f = exact_charge_fields(ChargeKinematics(C.e, v, np.array([0.0, 0.0, r])))
    assert np.linalg.norm(f.E) == pytest.approx(K * C.e / (gamma**2 * r**2), rel=1e-14)


def test_static_limit_is_coulomb():
    r = np.array([1e-6, -2e-6, 3e-7])
    f = exact_charge_fields(ChargeKinematics(-C.e, np.zeros(3), r))
    np.testing.assert_allclose(f.E, coulomb_E(-C.e, r), rtol=1e-15)
    np.testing.assert_array_equal(f.B, 0.0)


@pytest.mark.parametrize("factor", [2.0, 10.0, 1000.0])
def test_coulomb_inverse_square(factor):
    r = np.array([0.3e-6, 1e-6, 0.0])
    ratio = np.linalg.norm(coulomb_E(C.e, r)) / np.linalg.norm(coulomb_E(C.e, factor * r))
    assert ratio == pytest.approx(factor**2, rel=1e-14)


def test_singular_point():
    with pytest.raises(SingularPointError):
        ChargeKinematics(C.e, np.zeros(3), np.zeros(3))
    with pytest.raises(ValueError):
        ChargeKinematics(C.e, np.array([0.0, 0.0, C.c]), np.ones(3))


def test_dipole_on_axis_and_equator():
    mu, r = 2e-14, 3e-6
    m = np.array([mu, 0.0, 0.0])
    pref = C.mu0 * mu / (4 * math.pi * r**3)
    np.testing.assert_allclose(dipole_B(m, np.array([r, 0, 0])), [2 * pref, 0, 0], rtol=1e-14)
    np.testing.assert_allclose(dipole_B(m, np.array([0, r, 0])), [-pref, 0, 0], rtol=1e-14)
    assert closure_field_magnitude(mu, r) == pytest.approx(2 * pref, rel=1e-15)


def test_dipole_divergence_free():
    m = np.array([1e-14, 0.0, 0.0])
    rng = np.random.default_rng(3)
    for _ in range(20):
        r = rng.normal(size=3) * 1e-6
        h = 1e-3 * np.linalg.norm(r)
        div = 0.0
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            div += (dipole_B(m, r + e)[i] - dipole_B(m, r - e)[i]) / (2 * h)
        scale = np.linalg.norm(dipole_B(m, r)) / np.linalg.norm(r)
        assert abs(div) <= 1e-4 * scale


@settings(max_examples=100, deadline=None)
@given(a=st.floats(-1e3, 1e3), b=st.floats(-1e3, 1e3))
def test_dipole_linear_in_moment(a, b):
    r = np.array([1e-6, 2e-6, -0.5e-6])
    m1, m2 = np.array([1e-14, 0, 0]), np.array([0, 3e-14, 1e-14])
    lhs = dipole_B(a * m1 + b * m2, r)
    rhs = a * dipole_B(m1, r) + b * dipole_B(m2, r)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.abs(rhs).max() + 1e-300)


def test_motional_dipole_direction():
    # dipole moving along -z (electron rest frame) with moment along +x
    v0, mu = 1e7, 1e-14
    p = motional_electric_dipole(np.array([0, 0, -v0]), np.array([mu, 0, 0]))
    np.testing.assert_allclose(p, [0.0, -v0 * mu / C.c**2, 0.0], rtol=1e-15)


@pytest.mark.parametrize("beta", [0.01, 0.03, 0.05])
def test_simplified_field_deviation_bounded(beta):
    s = Scenario(mu=1e-14, y0=1e-5, v0=beta * C.c)
    for zeta in np.linspace(-1, 1, 201):
        z = zeta * s.y0
        r = s.solenoid_position - np.array([0.0, 0.0, z])
        exact = exact_charge_fields(ChargeKinematics(s.charge, s.velocity, r)).B[0]
        approx = simplified_charge_B(s, z).B[0]
        assert abs(exact - approx) / abs(exact) <= 2 * beta**2


def test_simplified_field_sign(ref):
    # electron moving +z, observation point at +y0: B = v x E / c^2 along -x... times negative charge
    b = simplified_charge_B(ref, 0.0).B
    expected = -ref.charge * ref.v0 * ref.y0 * K / (C.c**2 * ref.y0**3)
    assert b[0] == pytest.approx(expected, rel=1e-14)
    assert b[1] == 0.0 and b[2] == 0.0
