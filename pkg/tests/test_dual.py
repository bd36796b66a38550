import numpy as np
import pytest

from hkt import dual as dn

from helpers import central_difference


def f(x):
    return dn.sin(x[..., 0]) * dn.exp(x[..., 1]) + x[..., 2] ** 3 / (1.0 + x[..., 0] ** 2) + dn.log(2.0 + x[..., 1] ** 2)


def test_first_partials_match_central_differences():
    x = np.random.default_rng(1).uniform(-1, 1, size=(30, 3))
    ad = dn.partials(f, x)
    fd = central_difference(f, x)
    assert np.abs(ad - fd).max() / np.abs(fd).max() < 1e-6


def test_second_and_third_derivatives_of_polynomial_are_exact():
    x = np.array([[0.3, -0.7, 1.1]])
    g = lambda y: y[..., 0] ** 3 * y[..., 1] + y[..., 2] ** 2  # noqa: E731
    h = dn.partials(lambda y: dn.partials(g, y), x)
    assert h[0, 0, 0] == pytest.approx(6 * 0.3 * -0.7)
    assert h[0, 0, 1] == pytest.approx(3 * 0.3**2)
    t = dn.partials(lambda y: dn.partials(lambda z: dn.partials(g, z), y), x)
    assert t[0, 0, 0, 0] == pytest.approx(6 * -0.7)
    assert t[0, 0, 0, 1] == pytest.approx(6 * 0.3)


def test_nested_perturbations_do_not_mix():
    # d/dx [x * d/dy (x y)] = d/dx [x * x] = 2x
    x0 = np.array([1.5])
    inner = lambda x: dn.derivative(lambda y: x * y, x0 * 0 + 2.0, np.ones(1))  # noqa: E731
    outer = dn.derivative(lambda x: x * inner(x), x0, np.ones(1))
    assert outer[0] == pytest.approx(3.0)


def test_complex_values_carry_through():
    x = np.array([[0.4, 0.2]])
    fn = lambda y: (y[..., 0] + 1j * y[..., 1]) ** 2  # noqa: E731
    p = dn.partials(fn, x)[0]
    z = 0.4 + 0.2j
    assert p[0] == pytest.approx(2 * z)
    assert p[1] == pytest.approx(2j * z)


def test_value_of_plain_array_is_itself():
    a = np.arange(3.0)
    assert dn.value(a) is a or np.array_equal(dn.value(a), a)
