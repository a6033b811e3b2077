"""Operadores de potencial de capa discretizados por Nyström.

Sobre la propia frontera se usa la cuadratura producto de Kress para la parte
ln(4 sin²((t-s)/2)) del núcleo y la regla trapezoidal para el resto; entre
fronteras distintas el núcleo es suave y basta la regla trapezoidal (con
sobremuestreo 4x de la fuente si la distancia es menor que 3h).

Las matrices actúan sobre valores nodales de la densidad. El producto interno
es <f, g> = Σ w_i f_i conj(g_i).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import logging
from typing import Dict, Optional

import numpy as np
from scipy import linalg
from scipy import special

from ..errors import (
    DegenerateKernelError,
    NearSingularityError,
    SingularDenominatorError,
    SpectralToleranceError,
)
from . import specfun
from .geometry import DiscreteBoundary, discretize, enclosed_area

logger = logging.getLogger(__name__)

KINDS = (
    "single",
    "double",
    "np_adjoint",
    "s_hat",
    "s1_expansion",
    "s2_expansion",
    "k1_expansion",
    "k2_expansion",
    "single_dn",
)

NEAR_FIELD_FACTOR = 3.0
UPSAMPLE_FACTOR = 4
GAP_TOL = 1e-6
CONSTANCY_TOL = 1e-7
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteOperator:
    """Matriz densa de un operador de capa con metadatos del núcleo."""

    matrix: np.ndarray
    kind: str
    k: complex
    source: DiscreteBoundary = field(repr=False)
    target: Optional[DiscreteBoundary] = field(default=None, repr=False)

    def __post_init__(self):
        base_kind = self.kind.split(":")[-1]
        if base_kind not in KINDS:
            raise ValueError(f"tipo de núcleo desconocido: {self.kind}")

    @property
    def shape(self):
        return self.matrix.shape

    def apply(self, density) -> np.ndarray:
        return self.matrix @ np.asarray(density)


@dataclass(frozen=True)
class SpectralQuantities:
    """ψ0, γ0, c = <ψ0, φ0>, c_τ = <τψ0, φ0>, Vol(D) y perímetro."""

    boundary: DiscreteBoundary = field(repr=False)
    psi0: np.ndarray = field(repr=False)
    gamma0: float
    c: float
    c_tau: float
    area: float
    perimeter: float
    residual: float
    constancy: float


@lru_cache(maxsize=32)
def _kress_weights(n: int) -> np.ndarray:
    """R_{ij} tal que ∫ ln(4 sin²((t_i - s)/2)) f(s) ds ≈ Σ_j R_{ij} f(t_j)."""
    half = n // 2
    t = 2.0 * np.pi * np.arange(n) / n
    m = np.arange(1, half)
    row = -(2.0 * np.pi / half) * (np.cos(np.multiply.outer(t, m)) / m).sum(axis=1)
    row -= (np.pi / half ** 2) * np.cos(half * t)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return row[idx]


@lru_cache(maxsize=32)
def _log_sin(n: int) -> np.ndarray:
    t = 2.0 * np.pi * np.arange(n) / n
    d = t[:, None] - t[None, :]
    with np.errstate(divide="ignore"):
        out = np.log(4.0 * np.sin(0.5 * d) ** 2)
    np.fill_diagonal(out, 0.0)
    return out


def _pair_geometry(boundary: DiscreteBoundary):
    diff = boundary.nodes[:, None, :] - boundary.nodes[None, :, :]
    r = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(r, 1.0)
    return diff, r


def _kress_assemble(boundary: DiscreteBoundary, kernel, m1, diag_m2) -> np.ndarray:
    """A = R∘M1 + (2π/n) M2 con M = kernel·|x'(s)| = M1 ln(4 sin²) + M2."""
    n = boundary.n
    full = kernel * boundary.speed[None, :]
    m2 = full - m1 * _log_sin(n)
    m2 = np.array(m2, dtype=complex)
    np.fill_diagonal(m2, diag_m2)
    return _kress_weights(n) * m1 + (2.0 * np.pi / n) * m2


def _is_laplace(k) -> bool:
    return complex(k) == 0


def _same(src: DiscreteBoundary, tgt: Optional[DiscreteBoundary]) -> bool:
    return tgt is None or tgt is src


def _fundamental(k: complex, r: np.ndarray) -> np.ndarray:
    if _is_laplace(k):
        return np.log(r) / (2.0 * np.pi) + 0j
    return -0.25j * specfun.hankel1(0, k * r)


def _radial_derivative_over_r(k: complex, r: np.ndarray) -> np.ndarray:
    """(1/r) dΓ/dr, de modo que ∂Γ/∂ν = (1/r)dΓ/dr · <x - y, ν>."""
    if _is_laplace(k):
        return 1.0 / (2.0 * np.pi * r ** 2) + 0j
    return 0.25j * k * specfun.hankel1(1, k * r) / r


def single_layer(
    k: complex,
    src: DiscreteBoundary,
    tgt: Optional[DiscreteBoundary] = None,
    upsample: bool = True,
) -> DiscreteOperator:
    """S^k: sobre ∂D con cuadratura de Kress, entre fronteras con trapecios."""
    k = complex(k)
    if not _same(src, tgt):
        matrix = _offsurface_matrix(k, src, tgt.nodes, None, "single", upsample)
        return DiscreteOperator(matrix, "single", k, src, tgt)

    _, r = _pair_geometry(src)
    kernel = _fundamental(k, r)
    if _is_laplace(k):
        j0 = np.ones_like(r)
        eta_k = 0.0
    else:
        j0 = special.jv(0, k * r)
        np.fill_diagonal(j0, 1.0)
        eta_k = specfun.eta(k)
    m1 = j0 / (4.0 * np.pi) * src.speed[None, :]
    diag_m2 = (np.log(src.speed) / (2.0 * np.pi) + eta_k) * src.speed
    matrix = _kress_assemble(src, kernel, m1, diag_m2)
    return DiscreteOperator(matrix, "single", k, src, src)


def _normal_kernel(k: complex, boundary: DiscreteBoundary, adjoint: bool) -> np.ndarray:
    diff, r = _pair_geometry(boundary)
    if adjoint:
        proj = np.einsum("ijk,ik->ij", diff, boundary.normals)
    else:
        proj = np.einsum("ijk,jk->ij", -diff, boundary.normals)
    kernel = _radial_derivative_over_r(k, r) * proj
    if _is_laplace(k):
        m1 = np.zeros_like(kernel)
    else:
        m1 = -(k / (4.0 * np.pi)) * special.jv(1, k * r) / r * proj * boundary.speed[None, :]
        np.fill_diagonal(m1, 0.0)
    diag_m2 = boundary.curvature / (4.0 * np.pi) * boundary.speed
    return _kress_assemble(boundary, kernel, m1, diag_m2)


def np_adjoint(k: complex, boundary: DiscreteBoundary) -> DiscreteOperator:
    """(K^k)*: núcleo ∂Γ/∂ν_x; diagonal τ(x)/(4π)."""
    k = complex(k)
    return DiscreteOperator(_normal_kernel(k, boundary, adjoint=True), "np_adjoint", k, boundary, boundary)


def double_layer(k: complex, boundary: DiscreteBoundary) -> DiscreteOperator:
    """K^k (traza de D^k sobre ∂D): núcleo ∂Γ/∂ν_y."""
    k = complex(k)
    return DiscreteOperator(_normal_kernel(k, boundary, adjoint=False), "double", k, boundary, boundary)


def s_hat(k: complex, boundary: DiscreteBoundary) -> DiscreteOperator:
    """Ŝ^k[φ] = S_D[φ] + η_k ∫φ dσ."""
    k = complex(k)
    eta_k = specfun.eta(k)
    laplace = single_layer(0.0, boundary).matrix
    matrix = laplace + eta_k * np.outer(np.ones(boundary.n), boundary.weights)
    return DiscreteOperator(matrix, "s_hat", k, boundary, boundary)


def expansion_terms(boundary: DiscreteBoundary) -> Dict[str, DiscreteOperator]:
    """S^{(1)}_{D,1}, S^{(2)}_{D,1}, K^{(1)}_{D,1}, K^{(2)}_{D,1} del desarrollo en k pequeño."""
    coeffs = specfun.expansion_coeffs(1.0, 1)
    b1 = float(coeffs.b[0])
    c1 = complex(coeffs.c[0])
    n = boundary.n
    diff, r = _pair_geometry(boundary)
    r2 = r ** 2
    np.fill_diagonal(r2, 0.0)
    proj = np.einsum("ijk,ik->ij", diff, boundary.normals)
    speed = boundary.speed[None, :]
    trapezoid = 2.0 * np.pi / n
    zeros = np.zeros(n)

    s1 = trapezoid * b1 * r2 * speed
    s2 = _kress_assemble(boundary, r2 * (b1 * np.log(r) + c1), 0.5 * b1 * r2 * speed, zeros)
    k1 = trapezoid * 2.0 * b1 * proj * speed
    k2 = _kress_assemble(boundary, proj * (2.0 * b1 * np.log(r) + 2.0 * c1 + b1), b1 * proj * speed, zeros)

    return {
        "S1": DiscreteOperator(s1 + 0j, "s1_expansion", 0j, boundary, boundary),
        "S2": DiscreteOperator(s2, "s2_expansion", 0j, boundary, boundary),
        "K1": DiscreteOperator(k1 + 0j, "k1_expansion", 0j, boundary, boundary),
        "K2": DiscreteOperator(k2, "k2_expansion", 0j, boundary, boundary),
    }


def adjoint(op: DiscreteOperator) -> DiscreteOperator:
    """Adjunto respecto a los productos internos ponderados de fuente y destino."""
    if op.target is None:
        raise ValueError("el adjunto requiere una frontera destino")
    matrix = (op.matrix.conj().T * op.target.weights[None, :]) / op.source.weights[:, None]
    return DiscreteOperator(matrix, f"adjoint:{op.kind}", np.conj(op.k), op.target, op.source)


@lru_cache(maxsize=16)
def _trig_interp_matrix(n: int, m: int) -> np.ndarray:
    """Interpolación trigonométrica de n nodos equiespaciados a m nodos (m múltiplo de n)."""
    spectrum = np.fft.fft(np.eye(n), axis=0)
    half = n // 2
    padded = np.zeros((m, n), dtype=complex)
    padded[:half] = spectrum[:half]
    padded[m - half + 1:] = spectrum[half + 1:]
    padded[half] = 0.5 * spectrum[half]
    padded[m - half] = 0.5 * spectrum[half]
    return np.real(np.fft.ifft(padded, axis=0)) * (m / n)


def _min_distance(points: np.ndarray, nodes: np.ndarray) -> float:
    diff = points[:, None, :] - nodes[None, :, :]
    return float(np.min(np.linalg.norm(diff, axis=-1)))


def _raw_offsurface(k, src: DiscreteBoundary, points, normals, kind: str) -> np.ndarray:
    diff = points[:, None, :] - src.nodes[None, :, :]
    r = np.linalg.norm(diff, axis=-1)
    if kind == "single":
        kernel = _fundamental(k, r)
    elif kind == "single_dn":
        kernel = _radial_derivative_over_r(k, r) * np.einsum("ijk,ik->ij", diff, normals)
    elif kind == "double":
        kernel = _radial_derivative_over_r(k, r) * np.einsum("ijk,jk->ij", -diff, src.normals)
    else:
        raise ValueError(f"núcleo fuera de la frontera desconocido: {kind}")
    return kernel * src.weights[None, :]


def _offsurface_matrix(k, src: DiscreteBoundary, points, normals, kind: str, upsample: bool) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    dist = _min_distance(points, src.nodes)
    if dist >= NEAR_FIELD_FACTOR * src.max_spacing:
        return _raw_offsurface(k, src, points, normals, kind)
    if not upsample:
        raise NearSingularityError(
            f"distancia {dist:.3g} < {NEAR_FIELD_FACTOR}h = {NEAR_FIELD_FACTOR * src.max_spacing:.3g}; "
            "aumente n o active el sobremuestreo"
        )
    fine = discretize(src.curve, UPSAMPLE_FACTOR * src.n)
    if dist < NEAR_FIELD_FACTOR * fine.max_spacing:
        raise NearSingularityError(
            f"distancia {dist:.3g} demasiado pequeña incluso con sobremuestreo {UPSAMPLE_FACTOR}x (n={src.n})"
        )
    logger.info("Sobremuestreo %dx de la fuente (n=%d, distancia=%.3g)", UPSAMPLE_FACTOR, src.n, dist)
    raw = _raw_offsurface(k, fine, points, normals, kind)
    return raw @ _trig_interp_matrix(src.n, fine.n)


def normal_derivative_single_layer(
    k: complex,
    src: DiscreteBoundary,
    tgt: DiscreteBoundary,
    upsample: bool = True,
) -> DiscreteOperator:
    """∂S^k_{tgt,src}/∂ν en la frontera destino (fuente y destino distintos, sin saltos)."""
    k = complex(k)
    if _same(src, tgt):
        raise ValueError("para la misma frontera use ±1/2 I + K*")
    matrix = _offsurface_matrix(k, src, tgt.nodes, tgt.normals, "single_dn", upsample)
    return DiscreteOperator(matrix, "single_dn", k, src, tgt)


def single_layer_potential(k: complex, src: DiscreteBoundary, points, upsample: bool = True) -> np.ndarray:
    """Matriz de evaluación de S^k[φ] en puntos fuera de la frontera."""
    return _offsurface_matrix(complex(k), src, points, None, "single", upsample)


def double_layer_potential(k: complex, src: DiscreteBoundary, points, upsample: bool = True) -> np.ndarray:
    """Matriz de evaluación de D^k[φ] en puntos fuera de la frontera."""
    return _offsurface_matrix(complex(k), src, points, None, "double", upsample)


def spectral_quantities(boundary: DiscreteBoundary) -> SpectralQuantities:
    """ψ0 como vector singular de (-1/2 I + K*) con menor valor singular, y las constantes asociadas."""
    n = boundary.n
    operator = -0.5 * np.eye(n) + np_adjoint(0.0, boundary).matrix.real
    root_w = np.sqrt(boundary.weights)
    weighted = root_w[:, None] * operator / root_w[None, :]
    _, sigma, vh = linalg.svd(weighted)
    if sigma[-2] - sigma[-1] < GAP_TOL:
        raise DegenerateKernelError(
            f"los dos menores valores singulares ({sigma[-2]:.3e}, {sigma[-1]:.3e}) están a menos de {GAP_TOL}"
        )
    psi0 = vh[-1].conj().real / root_w
    psi0 = psi0 / boundary.norm(psi0)
    if np.sum(boundary.weights * psi0) < 0:
        psi0 = -psi0

    residual = boundary.norm(operator @ psi0)
    if residual > RESIDUAL_TOL:
        raise SpectralToleranceError(
            f"residuo de ψ0 = {residual:.3e} > {RESIDUAL_TOL:.0e} (n={n}); aumente n"
        )

    image = single_layer(0.0, boundary).matrix.real @ psi0
    gamma0 = float(np.mean(image))
    constancy = float(np.std(image) / abs(gamma0)) if gamma0 != 0 else 0.0
    if abs(gamma0) > 1e-6 and constancy > CONSTANCY_TOL:
        raise SpectralToleranceError(f"S_D[ψ0] no es constante: desviación relativa {constancy:.3e}")

    return SpectralQuantities(
        boundary=boundary,
        psi0=psi0,
        gamma0=gamma0,
        c=float(np.sum(boundary.weights * psi0)),
        c_tau=float(np.sum(boundary.weights * boundary.curvature * psi0)),
        area=enclosed_area(boundary),
        perimeter=boundary.perimeter,
        residual=residual,
        constancy=constancy,
    )


def a_constant(q: SpectralQuantities, k_b: complex, k_other: complex) -> complex:
    """a = (γ0 + c η_{k_b}) / (γ0 + c η_{k_other})."""
    if complex(k_b) == complex(k_other):
        return 1.0 + 0j
    denominator = q.gamma0 + q.c * specfun.eta(k_other)
    if abs(denominator) < 1e-14:
        raise SingularDenominatorError(f"γ0 + c η_k se anula para k={k_other}")
    return complex((q.gamma0 + q.c * specfun.eta(k_b)) / denominator)
