import numpy as np
import pytest
from scipy import special

from bubres.errors import SpecialFunctionDomainError
from bubres.numerics import specfun


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10])
@pytest.mark.parametrize("z", [0.3, 2.0 + 0.5j, 7.5 - 1.0j, 15.0 + 2.0j, 40.0])
def test_wronskian(n, z):
    lhs = specfun.bessel_j(n, z) * specfun.hankel1_deriv(n, z) - specfun.bessel_j_deriv(n, z) * specfun.hankel1(n, z)
    assert abs(lhs - 2j / (np.pi * z)) <= 1e-10 * abs(2j / (np.pi * z))


def test_array_argument_keeps_shape():
    z = np.array([[0.5, 1.0], [2.0 + 1j, 3.0]])
    out = specfun.hankel1(1, z)
    assert out.shape == (2, 2)
    assert np.allclose(out, special.hankel1(1, z))


@pytest.mark.parametrize("n", [0, 1, 3])
@pytest.mark.parametrize("radius", [12.5, 12.8, 13.0])
def test_series_and_asymptotic_agree_at_crossover(n, radius):
    z = radius + 0.5j
    series = specfun.hankel1_series(n, z)
    asym = specfun.hankel1_asymptotic(n, z)
    assert abs(series - asym) <= 1e-9 * abs(asym)


@pytest.mark.parametrize("n", [0, 2])
def test_piecewise_matches_scipy(n):
    for z in (0.1 + 0.05j, 3.0, 20.0 + 1j):
        assert abs(specfun.hankel1_piecewise(n, z) - special.hankel1(n, z)) <= 1e-9 * abs(special.hankel1(n, z))


@pytest.mark.parametrize(
    "call",
    [
        lambda: specfun.hankel1(0, 0.0),
        lambda: specfun.hankel1(0, -1.0 + 0j),
        lambda: specfun.hankel1(0, 1.0 - 2.0j),
        lambda: specfun.hankel1(11, 1.0),
        lambda: specfun.bessel_j(-1, 1.0),
        lambda: specfun.bessel_j(0, 800.0),
        lambda: specfun.eta(0.0),
    ],
)
def test_domain_errors(call):
    with pytest.raises(SpecialFunctionDomainError):
        call()


def test_eta_value():
    k = 0.7
    expected = (np.log(k) + np.euler_gamma - np.log(2.0)) / (2 * np.pi) - 0.25j
    assert specfun.eta(k) == pytest.approx(expected)


def test_expansion_coefficients():
    coeffs = specfun.expansion_coeffs(1.0, 3)
    assert coeffs.b[0] == pytest.approx(-1.0 / (8.0 * np.pi))
    assert coeffs.b[1] == pytest.approx(1.0 / (2.0 * np.pi * 16.0 * 4.0))
    assert coeffs.c[0] == pytest.approx(coeffs.b[0] * (np.euler_gamma - np.log(2.0) - 0.5j * np.pi - 1.0))
    assert coeffs.j_max == 3
    with pytest.raises(ValueError):
        specfun.expansion_coeffs(1.0, 0)


@pytest.mark.parametrize("k", [0.5, 0.2 - 0.01j])
def test_truncated_fundamental_matches_hankel(k):
    r = np.array([0.05, 0.2, 0.5])
    exact = -0.25j * special.hankel1(0, k * r)
    coeffs = specfun.expansion_coeffs(k, 6)
    assert np.allclose(specfun.truncated_fundamental(k, r, coeffs), exact, rtol=1e-10, atol=1e-12)
    # un solo término deja un resto O((kr)^4 ln kr)
    short = specfun.truncated_fundamental(k, r, specfun.expansion_coeffs(k, 1))
    assert np.max(np.abs(short - exact)) < 1e-3


def test_reference_values():
    assert specfun.bessel_j(0, 0.0) == 1.0
    assert specfun.bessel_j(1, 0.0) == 0.0
    assert specfun.bessel_j(0, 1.0) == pytest.approx(0.765197686557967, rel=1e-14)
    assert specfun.hankel1(0, 1.0) == pytest.approx(0.7651976866 + 0.0882569642j, abs=1e-10)


def test_conjugate_reflection():
    z = 0.8 - 0.05j
    lhs = specfun.hankel1(0, np.conj(z))
    rhs = np.conj(2 * specfun.bessel_j(0, z) - specfun.hankel1(0, z))
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_derivatives():
    assert specfun.hankel1_deriv(0, 1.0) == -specfun.hankel1(1, 1.0)
    z = 2.0 + 0.1j
    second = -specfun.hankel1_deriv(1, z)
    assert abs(specfun.hankel1_deriv(0, z) / z + second + specfun.hankel1(0, z)) < 1e-9
    h = 1e-5
    fd = (specfun.hankel1(1, 2.0 + h) - specfun.hankel1(1, 2.0 - h)) / (2 * h)
    assert abs(specfun.hankel1_deriv(1, 2.0) - fd) < 1e-7


def test_two_term_truncation_order():
    coeffs = specfun.expansion_coeffs(1.0, 2)
    kr = np.array([0.1, 0.05, 0.025])
    error = np.abs(specfun.truncated_fundamental(1.0, kr, coeffs) + 0.25j * special.hankel1(0, kr))
    slope = np.log(error[0] / error[-1]) / np.log(4.0)
    assert slope >= 5.5
