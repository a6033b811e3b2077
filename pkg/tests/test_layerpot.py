import numpy as np
import pytest
from scipy import linalg, special

from bubres.errors import DegenerateKernelError, NearSingularityError, SpectralToleranceError
from bubres.numerics import layerpot, specfun
from bubres.numerics.geometry import circle, discretize, ellipse, enclosed_area, offset_curve

R = 0.5


def _theta(boundary):
    return np.arctan2(boundary.nodes[:, 1], boundary.nodes[:, 0])


@pytest.mark.parametrize("m", [1, 2, 5])
def test_laplace_single_layer_spectrum_on_circle(half_circle, m):
    theta = _theta(half_circle)
    S = layerpot.single_layer(0.0, half_circle)
    assert np.allclose(S.apply(np.cos(m * theta)), -R / (2 * m) * np.cos(m * theta), atol=1e-12)
    assert np.allclose(S.apply(np.ones(half_circle.n)), R * np.log(R), atol=1e-12)


def test_laplace_np_adjoint_on_circle(half_circle):
    theta = _theta(half_circle)
    K_star = layerpot.np_adjoint(0.0, half_circle)
    assert np.allclose(K_star.apply(np.ones(half_circle.n)), 0.5, atol=1e-12)
    for m in (1, 3):
        assert np.allclose(K_star.apply(np.cos(m * theta)), 0.0, atol=1e-12)


@pytest.mark.parametrize("k", [0.0, 0.7, 0.3 - 0.02j])
def test_weighted_symmetry(small_ellipse, k):
    W = np.diag(small_ellipse.weights)
    S = layerpot.single_layer(k, small_ellipse).matrix
    assert np.allclose(W @ S, (W @ S).T, atol=1e-12)
    K = layerpot.double_layer(k, small_ellipse).matrix
    K_star = layerpot.np_adjoint(k, small_ellipse).matrix
    assert np.allclose(W @ K, (W @ K_star).T, atol=1e-12)


def test_adjoint_inner_product_and_involution(small_ellipse):
    rng = np.random.default_rng(7)
    f = rng.normal(size=small_ellipse.n) + 1j * rng.normal(size=small_ellipse.n)
    g = rng.normal(size=small_ellipse.n) + 1j * rng.normal(size=small_ellipse.n)
    op = layerpot.np_adjoint(0.4 + 0.1j, small_ellipse)
    star = layerpot.adjoint(op)
    lhs = small_ellipse.inner(op.apply(f), g)
    rhs = small_ellipse.inner(f, star.apply(g))
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)
    assert np.allclose(layerpot.adjoint(star).matrix, op.matrix)
    assert star.kind == "adjoint:np_adjoint"


@pytest.mark.parametrize("shape", [circle(0.5), ellipse(0.6, 0.4)])
def test_k1_expansion_adjoint_on_constants(shape):
    b = discretize(shape, 128)
    b1 = specfun.expansion_coeffs(1.0, 1).b[0]
    terms = layerpot.expansion_terms(b)
    image = layerpot.adjoint(terms["K1"]).apply(np.ones(b.n))
    assert np.allclose(image, 4.0 * b1 * enclosed_area(b), rtol=1e-10)


def _slope(errors, factor):
    return float(np.log(errors[0] / errors[-1]) / np.log(factor ** (len(errors) - 1)))


def test_small_k_expansion_remainder():
    b = discretize(ellipse(0.6, 0.4), 64)
    terms = layerpot.expansion_terms(b)
    s_err, k_err = [], []
    for k in (0.2, 0.1, 0.05):
        s_approx = layerpot.s_hat(k, b).matrix + k * k * np.log(k) * terms["S1"].matrix + k * k * terms["S2"].matrix
        s_err.append(np.linalg.norm(layerpot.single_layer(k, b).matrix - s_approx))
        k_approx = (layerpot.np_adjoint(0.0, b).matrix + k * k * np.log(k) * terms["K1"].matrix
                    + k * k * terms["K2"].matrix)
        k_err.append(np.linalg.norm(layerpot.np_adjoint(k, b).matrix - k_approx))
    assert _slope(s_err, 2.0) >= 3.5
    assert _slope(k_err, 2.0) >= 3.5


def test_s_hat_invertible_on_unit_circle():
    b = discretize(circle(1.0), 64)
    sigma = linalg.svdvals(layerpot.single_layer(0.0, b).matrix)
    assert sigma[-1] / sigma[0] < 1e-10
    sigma_hat = linalg.svdvals(layerpot.s_hat(0.5, b).matrix)
    assert sigma_hat[-1] / sigma_hat[0] > 1e-4


def test_single_layer_potential_outside_circle(half_circle):
    angles = np.linspace(0, 2 * np.pi, 9, endpoint=False)
    for rho in (0.8, 0.56):
        points = rho * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        values = layerpot.single_layer_potential(0.0, half_circle, points) @ np.ones(half_circle.n)
        assert np.allclose(values, R * np.log(rho), atol=1e-8)
    with pytest.raises(NearSingularityError):
        layerpot.single_layer_potential(0.0, half_circle, points, upsample=False)


def test_double_layer_potential_on_circle(half_circle):
    theta = _theta(half_circle)
    density = np.cos(theta)
    angles = np.linspace(0.1, 2 * np.pi, 7, endpoint=False)
    for rho, expected in ((0.3, 0.3 / (2 * R)), (0.8, -R / (2 * 0.8))):
        points = rho * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        values = layerpot.double_layer_potential(0.0, half_circle, points) @ density
        assert np.allclose(values, expected * np.cos(angles), atol=1e-10)


def test_normal_derivative_on_concentric_circle():
    b = discretize(circle(R), 256)
    theta = _theta(b)
    for rho in (0.6, 0.52, 0.51):
        target = discretize(circle(rho), 256)
        op = layerpot.normal_derivative_single_layer(0.0, b, target)
        assert np.allclose(op.apply(np.ones(b.n)), R / rho, atol=1e-6)
        # exterior de S[cos θ] = -(R²/2ρ) cos θ
        assert np.allclose(op.apply(np.cos(theta)), R ** 2 / (2 * rho ** 2) * np.cos(theta), atol=1e-6)
    with pytest.raises(ValueError):
        layerpot.normal_derivative_single_layer(0.0, b, b)


def test_spectral_quantities_circle(half_circle):
    q = layerpot.spectral_quantities(half_circle)
    c = np.sqrt(2 * np.pi * R)
    assert q.c == pytest.approx(c, rel=1e-10)
    assert q.gamma0 == pytest.approx(np.sqrt(R / (2 * np.pi)) * np.log(R), rel=1e-10)
    assert q.c_tau == pytest.approx(c / R, rel=1e-10)
    assert q.area == pytest.approx(np.pi * R * R)
    assert np.allclose(q.psi0, 1.0 / c, rtol=1e-10)
    assert q.residual < 1e-10
    assert q.constancy < 1e-10


def test_spectral_quantities_ellipse(small_ellipse):
    q = layerpot.spectral_quantities(small_ellipse)
    image = layerpot.single_layer(0.0, small_ellipse).matrix.real @ q.psi0
    assert np.allclose(image, q.gamma0, atol=1e-9)
    assert small_ellipse.norm(q.psi0) == pytest.approx(1.0)
    assert q.c > 0


def test_a_constant_identity(half_circle):
    q = layerpot.spectral_quantities(half_circle)
    assert layerpot.a_constant(q, 0.05, 0.05) == 1.0
    assert layerpot.a_constant(q, 0.05, 0.04) != 1.0


def _offset_setup(eps, n=512):
    base = ellipse(0.6, 0.4)
    inner = discretize(base, n)
    outer = discretize(offset_curve(base, eps), n)
    t = inner.t
    density = 1.0 + 0.3 * np.cos(t) + 0.2 * np.sin(2 * t)
    return inner, outer, density


@pytest.mark.slow
@pytest.mark.parametrize("which", ["to_offset", "on_offset", "from_offset"])
def test_thin_layer_expansions(which):
    k = 0.5
    errors = []
    for eps in (0.04, 0.02, 0.01):
        inner, outer, phi = _offset_setup(eps)
        S = layerpot.single_layer(k, inner).matrix
        K = layerpot.double_layer(k, inner).matrix
        K_star = layerpot.np_adjoint(k, inner).matrix
        s_phi = S @ phi
        s_tau_phi = S @ (inner.curvature * phi)
        if which == "to_offset":
            value = layerpot.single_layer(k, inner, outer).apply(phi)
            approx = s_phi + eps * (0.5 * phi + K_star @ phi)
        elif which == "on_offset":
            value = layerpot.single_layer(k, outer).apply(phi)
            approx = s_phi + eps * (K @ phi + K_star @ phi) + eps * s_tau_phi
        else:
            value = layerpot.single_layer(k, outer, inner).apply(phi)
            approx = s_phi + eps * (0.5 * phi + K @ phi) + eps * s_tau_phi
        errors.append(np.max(np.abs(value - approx)))
    assert _slope(errors, 2.0) >= 1.7


def test_spectral_quantities_tolerance_errors(small_ellipse, monkeypatch):
    q = layerpot.spectral_quantities(small_ellipse)
    assert q.residual <= layerpot.RESIDUAL_TOL
    assert q.constancy <= layerpot.CONSTANCY_TOL

    with monkeypatch.context() as m:
        m.setattr(layerpot, "RESIDUAL_TOL", -1.0)
        with pytest.raises(SpectralToleranceError, match="residuo"):
            layerpot.spectral_quantities(small_ellipse)
    with monkeypatch.context() as m:
        m.setattr(layerpot, "CONSTANCY_TOL", -1.0)
        with pytest.raises(SpectralToleranceError, match="constante"):
            layerpot.spectral_quantities(small_ellipse)
    with monkeypatch.context() as m:
        m.setattr(layerpot, "GAP_TOL", 1e3)
        with pytest.raises(DegenerateKernelError):
            layerpot.spectral_quantities(small_ellipse)


def test_normal_derivative_jump_from_outside():
    # ∂S[φ]/∂ν(x + tν) -> (1/2 I + K*)[φ](x) con error O(t)
    k = 0.5
    base = ellipse(0.6, 0.4)
    inner = discretize(base, 512)
    phi = 1.0 + 0.3 * np.cos(inner.t) + 0.2 * np.sin(2 * inner.t)
    limit = 0.5 * phi + layerpot.np_adjoint(k, inner).apply(phi)
    errors = []
    for t in (0.04, 0.02, 0.01):
        outer = discretize(offset_curve(base, t), 512)
        value = layerpot.normal_derivative_single_layer(k, inner, outer).apply(phi)
        errors.append(np.max(np.abs(value - limit)))
    assert errors[-1] < 0.1
    assert errors[0] > errors[1] > errors[2]
    assert _slope(errors, 2.0) >= 0.7


def test_double_layer_of_constant(half_circle, small_ellipse):
    ones = np.ones(half_circle.n)
    assert np.allclose(layerpot.double_layer(0.0, half_circle).apply(ones), 0.5, atol=1e-12)
    inside = np.array([[0.0, 0.0], [0.2, 0.1], [-0.4, 0.0], [0.1, -0.25]])
    outside = np.array([[0.9, 0.0], [0.0, 0.7], [-0.8, 0.5]])
    D_in = layerpot.double_layer_potential(0.0, small_ellipse, inside)
    D_out = layerpot.double_layer_potential(0.0, small_ellipse, outside)
    assert np.allclose(D_in @ np.ones(small_ellipse.n), 1.0, atol=1e-10)
    assert np.allclose(D_out @ np.ones(small_ellipse.n), 0.0, atol=1e-10)


def _circle_single_layer_exact(k, theta, rho_coeff, modes=60):
    # φ = 1/(a - cos θ) = Σ_m ρ^|m| e^{imθ} / sqrt(a² - 1) con ρ = a - sqrt(a² - 1)
    a = 0.5 * (rho_coeff + 1.0 / rho_coeff)
    total = np.zeros_like(theta, dtype=complex)
    for m in range(-modes, modes + 1):
        eig = -0.5j * np.pi * R * special.jv(m, k * R) * special.hankel1(m, k * R)
        total += rho_coeff ** abs(m) / np.sqrt(a * a - 1.0) * eig * np.exp(1j * m * theta)
    return a, total


def test_helmholtz_single_layer_converges_under_refinement():
    k = 2.0
    errors = []
    for n in (32, 64):
        b = discretize(circle(R), n)
        a, exact = _circle_single_layer_exact(k, b.t, 0.5)
        phi = 1.0 / (a - np.cos(b.t))
        errors.append(np.max(np.abs(layerpot.single_layer(k, b).apply(phi) - exact)))
    assert errors[0] > 1e-12
    assert errors[1] <= 1e-3 * errors[0]


@pytest.mark.parametrize("k", [0.5, 0.1 - 0.01j])
def test_s_hat_shift_on_constants(small_ellipse, k):
    ones = np.ones(small_ellipse.n)
    shift = layerpot.s_hat(k, small_ellipse).apply(ones) - layerpot.single_layer(0.0, small_ellipse).apply(ones)
    expected = specfun.eta(k) * small_ellipse.perimeter
    assert np.allclose(shift, expected, rtol=1e-13)
