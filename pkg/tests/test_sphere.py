import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xfreq_noise.sphere import SphereQuadrature, build_product_rule, polar_angle, sphere_average


def test_weights_sum_to_full_solid_angle():
    q = build_product_rule(8, 16)
    assert math.isclose(q.weights.sum(), 4 * math.pi, rel_tol=1e-14)
    assert np.allclose(np.linalg.norm(q.nodes, axis=1), 1.0)


def test_dipole_pattern_integral():
    # integral of sin^2(theta) over the sphere is 8 pi / 3
    q = build_product_rule(4, 8)
    val = q.integrate(lambda k: 1.0 - k[:, 2] ** 2)
    assert val == pytest.approx(8 * math.pi / 3, rel=1e-14)


def test_monomial_moment():
    # <x^2 y^2 z^2> over the sphere = 1/105
    q = build_product_rule(6, 12)
    val = sphere_average(lambda k: (k[:, 0] * k[:, 1] * k[:, 2]) ** 2, q)
    assert val == pytest.approx(1 / 105, rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(kd=st.floats(0.0, 30.0))
def test_plane_wave_average_is_sinc(kd):
    # <exp(-j kd cos theta)> = sin(kd)/kd
    q = build_product_rule(48, 4)
    val = sphere_average(lambda k: np.exp(-1j * kd * k[:, 2]), q)
    assert abs(val - np.sinc(kd / math.pi)) < 1e-12


def test_scalar_callable_fallback():
    q = build_product_rule(4, 8)
    vec = q.integrate(lambda k: k[..., 2] ** 2)
    loop = q.integrate(lambda k: float(k[2] ** 2) if k.ndim == 1 else (_ for _ in ()).throw(TypeError()))
    assert vec == pytest.approx(loop, rel=1e-14)


def test_polar_angle():
    assert polar_angle(np.array([0.0, 0.0, 1.0])) == 0.0
    assert polar_angle(np.array([1.0, 0.0, 0.0])) == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("bad", [(0, 4), (4, 0), (-1, 3)])
def test_rejects_empty_rule(bad):
    with pytest.raises(ValueError):
        build_product_rule(*bad)


def test_rejects_non_unit_nodes():
    with pytest.raises(ValueError):
        SphereQuadrature(nodes=np.array([[2.0, 0, 0]]), weights=np.array([4 * math.pi]), order=0)
