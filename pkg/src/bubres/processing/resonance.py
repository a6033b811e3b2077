"""Resonancias de burbujas: fórmula de Minnaert, corrimiento por recubrimiento,
valores característicos por BEM y oráculo multipolar para círculos.

Frecuencias y longitudes son adimensionales (tamaño de la burbuja de orden uno).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConfigError, GeometryError, SingularDenominatorError, WrongBranchError
from ..numerics import layerpot, specfun
from ..numerics.geometry import DiscreteBoundary, discretize, offset_curve
from ..numerics.layerpot import SpectralQuantities
from ..numerics.rootfind import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL_F,
    DEFAULT_TOL_X,
    RootResult,
    char_value,
    check_conditioning,
    muller,
    seeds_around,
)

logger = logging.getLogger(__name__)

METHODS = ("minnaert_formula", "coated_formula", "bem_uncoated", "bem_coated", "multipole")
QUASI_STATIC_DELTA = 0.1
IMAG_TOL = 1e-12


@dataclass(frozen=True)
class PhysicalConfig:
    """Densidades y módulos de compresibilidad de burbuja (b), capa (l) y agua (w)."""

    rho_b: float
    rho_l: float
    rho_w: float
    kappa_b: float
    kappa_l: float
    kappa_w: float

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} debe ser finito y > 0 (valor: {value})")

    @classmethod
    def from_contrasts(
        cls,
        v_b: float,
        v_l: float,
        v_w: float,
        delta: float,
        delta_lw: float = 1.0,
        rho_w: float = 1.0,
    ) -> "PhysicalConfig":
        """Forma abreviada {v_b, v_l, v_w, δ, δ_lw}: ρ_b = δρ_w, ρ_l = δ_lw ρ_w, κ = ρv²."""
        rho_b = delta * rho_w
        rho_l = delta_lw * rho_w
        return cls(
            rho_b=rho_b,
            rho_l=rho_l,
            rho_w=rho_w,
            kappa_b=rho_b * v_b ** 2,
            kappa_l=rho_l * v_l ** 2,
            kappa_w=rho_w * v_w ** 2,
        )

    @property
    def v_b(self) -> float:
        return float(np.sqrt(self.kappa_b / self.rho_b))

    @property
    def v_l(self) -> float:
        return float(np.sqrt(self.kappa_l / self.rho_l))

    @property
    def v_w(self) -> float:
        return float(np.sqrt(self.kappa_w / self.rho_w))

    @property
    def delta_bl(self) -> float:
        return self.rho_b / self.rho_l

    @property
    def delta_lw(self) -> float:
        return self.rho_l / self.rho_w

    @property
    def delta(self) -> float:
        # δ = δ_bl·δ_lw exacto en aritmética de punto flotante
        return self.delta_bl * self.delta_lw

    def wavenumbers(self, omega: complex) -> Tuple[complex, complex, complex]:
        """(k_b, k_l, k_w) = ω/v."""
        omega = complex(omega)
        return omega / self.v_b, omega / self.v_l, omega / self.v_w

    def snapshot(self) -> Dict[str, float]:
        out = asdict(self)
        out.update(delta=self.delta, delta_bl=self.delta_bl, delta_lw=self.delta_lw,
                   v_b=self.v_b, v_l=self.v_l, v_w=self.v_w)
        return out


@dataclass(frozen=True)
class SolverOptions:
    tol_x: float = DEFAULT_TOL_X
    tol_f: float = DEFAULT_TOL_F
    max_iter: int = DEFAULT_MAX_ITER
    mode: str = "inv_sigma_min"
    upsample: bool = True


@dataclass
class ResonanceResult:
    omega: complex
    method: str
    residual: float
    iterations: int
    inputs: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"método desconocido: {self.method}")
        self.omega = complex(self.omega)
        if self.omega.real <= 0 or self.omega.imag > IMAG_TOL:
            raise WrongBranchError(
                f"{self.method}: ω = {self.omega} no es física (se requiere Re ω > 0 e Im ω <= 0)"
            )


def _inputs(q: Optional[SpectralQuantities], cfg: PhysicalConfig, eps: float = 0.0, **extra) -> Dict[str, object]:
    snap: Dict[str, object] = {"epsilon": float(eps), "config": cfg.snapshot()}
    if q is not None and q.boundary is not None:
        curve = q.boundary.curve
        snap["shape"] = {"kind": curve.kind, "params": dict(curve.params)}
        snap["n"] = q.boundary.n
    snap.update(extra)
    return snap


def circle_quantities(r: float) -> SpectralQuantities:
    """Constantes exactas del círculo: ψ0 = 1/√(2πr), c = √(2πr), γ0 = √(r/2π)·ln r."""
    if r <= 0:
        raise GeometryError("el radio debe ser positivo")
    c = float(np.sqrt(2.0 * np.pi * r))
    return SpectralQuantities(
        boundary=None,
        psi0=None,
        gamma0=float(np.sqrt(r / (2.0 * np.pi)) * np.log(r)),
        c=c,
        c_tau=c / r,
        area=float(np.pi * r * r),
        perimeter=float(2.0 * np.pi * r),
        residual=0.0,
        constancy=0.0,
    )


def a_constant(q: SpectralQuantities, cfg: PhysicalConfig, omega: complex) -> complex:
    """a(ω) = (γ0 + cη_{k_b})/(γ0 + cη_{k_w})."""
    k_b, _, k_w = cfg.wavenumbers(omega)
    return layerpot.a_constant(q, k_b, k_w)


def a_constant_layer(q: SpectralQuantities, cfg: PhysicalConfig, omega: complex) -> complex:
    """a_l(ω) = (γ0 + cη_{k_b})/(γ0 + cη_{k_l})."""
    k_b, k_l, _ = cfg.wavenumbers(omega)
    return layerpot.a_constant(q, k_b, k_l)


def minnaert_uncoated(
    q: SpectralQuantities,
    cfg: PhysicalConfig,
    options: Optional[SolverOptions] = None,
) -> ResonanceResult:
    """Raíz con Re ω > 0 de

        ω² ln ω + [(1 + c1/b1 - ln v_b) + 2πγ0/c] ω² - v_b² a(ω) δ / (4 Vol(D) b1) = 0,

    resuelta con Muller reevaluando a(ω) en cada iteración.
    """
    options = options or SolverOptions()
    if cfg.delta > QUASI_STATIC_DELTA:
        raise ConfigError(f"δ = {cfg.delta:g} fuera del régimen cuasiestático (δ <= {QUASI_STATIC_DELTA})")
    coeffs = specfun.expansion_coeffs(1.0, 1)
    b1 = float(coeffs.b[0])
    c1 = complex(coeffs.c[0])
    v_b = cfg.v_b
    bracket = 1.0 + c1 / b1 - np.log(v_b) + 2.0 * np.pi * q.gamma0 / q.c
    load = v_b ** 2 * cfg.delta / (4.0 * q.area * b1)

    def equation(omega: complex) -> complex:
        return omega * omega * np.log(omega) + bracket * omega * omega - load * a_constant(q, cfg, omega)

    # una pasada de punto fijo desde ω_g = √δ: ω² ln ω ≈ v_b² a δ / (4 Vol b1)
    omega_g = complex(np.sqrt(cfg.delta))
    guess = complex(np.sqrt(load * a_constant(q, cfg, omega_g) / np.log(omega_g)))
    if guess.real < 0:
        guess = -guess
    scale = abs(load)
    root = muller(lambda w: equation(w) / scale, seeds_around(guess), options.tol_x, options.tol_f, options.max_iter)
    logger.info("Minnaert: ω_M = %s (%d iteraciones, semilla %s)", root.root, root.iterations, guess)
    return ResonanceResult(
        omega=root.root,
        method="minnaert_formula",
        residual=root.residual,
        iterations=root.iterations,
        inputs=_inputs(q, cfg, seed=guess),
    )


def coated_shift(
    omega_M: complex,
    q: SpectralQuantities,
    cfg: PhysicalConfig,
    eps: float,
) -> ResonanceResult:
    """ω_ε = ω_M + ε·2πω_M a(δ_lw - 1) / (4πc(γ0 + η_{k_b}c) - c²(1 - a)), con a = a(ω_M)."""
    eps = float(eps)
    if eps < 0:
        raise GeometryError("el espesor ε debe ser >= 0")
    omega_M = complex(omega_M)
    k_b, _, _ = cfg.wavenumbers(omega_M)
    a = a_constant(q, cfg, omega_M)
    denominator = 4.0 * np.pi * q.c * (q.gamma0 + specfun.eta(k_b) * q.c) - q.c ** 2 * (1.0 - a)
    if abs(denominator) < 1e-14:
        raise SingularDenominatorError(f"denominador del corrimiento nulo en ω_M = {omega_M}")
    shift = eps * 2.0 * np.pi * omega_M * a * (cfg.delta_lw - 1.0) / denominator
    return ResonanceResult(
        omega=omega_M + shift,
        method="coated_formula",
        residual=0.0,
        iterations=0,
        inputs=_inputs(q, cfg, eps, omega_M=omega_M, shift=shift),
    )


def coated_shift_circle(omega_M: complex, r: float, cfg: PhysicalConfig, eps: float) -> ResonanceResult:
    """`coated_shift` con las constantes cerradas del círculo de radio r."""
    result = coated_shift(omega_M, circle_quantities(r), cfg, eps)
    result.inputs["shape"] = {"kind": "circle", "params": {"r": r}}
    return result


def leading_mode_vectors(q: SpectralQuantities, cfg: PhysicalConfig, omega_M: complex) -> np.ndarray:
    """Vector de orden principal del núcleo del sistema recubierto,
    Ψ0 ∝ (ψ0, δ_lw a ψ0, (a_l - aδ_lw)ψ0, aψ0), normalizado en L² ponderado.

    Devuelve un arreglo (4, n).
    """
    if q.psi0 is None or q.boundary is None:
        raise ValueError("se necesitan ψ0 discretos (use layerpot.spectral_quantities)")
    a = a_constant(q, cfg, omega_M)
    a_l = a_constant_layer(q, cfg, omega_M)
    factors = np.array([1.0, cfg.delta_lw * a, a_l - a * cfg.delta_lw, a], dtype=complex)
    modes = factors[:, None] * q.psi0[None, :]
    norm = np.sqrt(sum(q.boundary.norm(row) ** 2 for row in modes))
    return modes / norm


def assemble_uncoated_system(omega: complex, boundary: DiscreteBoundary, cfg: PhysicalConfig) -> np.ndarray:
    """M0(ω, δ) = [[S^{k_b}, -S^{k_w}], [-1/2 I + K*^{k_b}, -δ(1/2 I + K*^{k_w})]]."""
    k_b, _, k_w = cfg.wavenumbers(omega)
    eye = np.eye(boundary.n)
    s_b = layerpot.single_layer(k_b, boundary).matrix
    s_w = layerpot.single_layer(k_w, boundary).matrix
    k_star_b = layerpot.np_adjoint(k_b, boundary).matrix
    k_star_w = layerpot.np_adjoint(k_w, boundary).matrix
    return np.block([
        [s_b, -s_w],
        [-0.5 * eye + k_star_b, -cfg.delta * (0.5 * eye + k_star_w)],
    ])


def coating_boundary(boundary: DiscreteBoundary, eps: float) -> DiscreteBoundary:
    """Discretiza ∂D_d = {x + εν} con el mismo número de nodos que ∂D."""
    outer = discretize(offset_curve(boundary.curve, eps), boundary.n)
    if outer.max_spacing > eps / layerpot.NEAR_FIELD_FACTOR:
        logger.info(
            "h = %.3g > ε/%g: las interacciones entre fronteras usarán sobremuestreo",
            outer.max_spacing, layerpot.NEAR_FIELD_FACTOR,
        )
    return outer


def assemble_coated_system(
    omega: complex,
    boundary: DiscreteBoundary,
    eps: float,
    cfg: PhysicalConfig,
    upsample: bool = True,
    outer: Optional[DiscreteBoundary] = None,
) -> np.ndarray:
    """𝒜(ω, ε, δ) de 4n×4n con densidades (φ1, φ2, φ3, φ4) en (∂D, ∂D, ∂D_d, ∂D_d)."""
    if eps <= 0:
        raise GeometryError("el sistema recubierto requiere ε > 0")
    inner = boundary
    outer = outer if outer is not None else coating_boundary(boundary, eps)
    k_b, k_l, k_w = cfg.wavenumbers(omega)
    eye = np.eye(inner.n)
    zero = np.zeros((inner.n, inner.n), dtype=complex)

    s_in_b = layerpot.single_layer(k_b, inner).matrix
    s_in_l = layerpot.single_layer(k_l, inner).matrix
    s_out_l = layerpot.single_layer(k_l, outer).matrix
    s_out_w = layerpot.single_layer(k_w, outer).matrix
    # S_{D,D_d}: fuente ∂D_d, destino ∂D ; S_{D_d,D}: fuente ∂D, destino ∂D_d
    s_in_from_out = layerpot.single_layer(k_l, outer, inner, upsample).matrix
    s_out_from_in = layerpot.single_layer(k_l, inner, outer, upsample).matrix
    dn_in_from_out = layerpot.normal_derivative_single_layer(k_l, outer, inner, upsample).matrix
    dn_out_from_in = layerpot.normal_derivative_single_layer(k_l, inner, outer, upsample).matrix

    k_in_b = layerpot.np_adjoint(k_b, inner).matrix
    k_in_l = layerpot.np_adjoint(k_l, inner).matrix
    k_out_l = layerpot.np_adjoint(k_l, outer).matrix
    k_out_w = layerpot.np_adjoint(k_w, outer).matrix

    d_bl = cfg.delta_bl
    d_lw = cfg.delta_lw
    return np.block([
        [s_in_b, -s_in_l, -s_in_from_out, zero],
        [zero, s_out_from_in, s_out_l, -s_out_w],
        [-0.5 * eye + k_in_b, -d_bl * (0.5 * eye + k_in_l), -d_bl * dn_in_from_out, zero],
        [zero, dn_out_from_in, -0.5 * eye + k_out_l, -d_lw * (0.5 * eye + k_out_w)],
    ])


def default_seeds(boundary: DiscreteBoundary, cfg: PhysicalConfig, eps: float = 0.0,
                  options: Optional[SolverOptions] = None) -> Sequence[complex]:
    """Semillas {0.95, 1, 1.05}·(ω_M o ω_ε de las fórmulas asintóticas)."""
    q = layerpot.spectral_quantities(boundary)
    omega_M = minnaert_uncoated(q, cfg, options).omega
    guess = coated_shift(omega_M, q, cfg, eps).omega if eps > 0 else omega_M
    return seeds_around(guess)


def bem_resonance(
    boundary: DiscreteBoundary,
    cfg: PhysicalConfig,
    eps: float = 0.0,
    seeds: Optional[Sequence[complex]] = None,
    options: Optional[SolverOptions] = None,
) -> ResonanceResult:
    """Valor característico de M0 (ε = 0) o de 𝒜 (ε > 0) cerca de las semillas."""
    options = options or SolverOptions()
    eps = float(eps)
    if eps < 0:
        raise GeometryError("el espesor ε debe ser >= 0")
    if seeds is None:
        seeds = default_seeds(boundary, cfg, eps, options)

    if eps == 0:
        method = "bem_uncoated"

        def system(omega: complex) -> np.ndarray:
            return assemble_uncoated_system(omega, boundary, cfg)
    else:
        method = "bem_coated"
        outer = coating_boundary(boundary, eps)

        def system(omega: complex) -> np.ndarray:
            return assemble_coated_system(omega, boundary, eps, cfg, options.upsample, outer)

    logger.info("BEM %s: n=%d, ε=%g, modo=%s", method, boundary.n, eps, options.mode)
    check_conditioning(system(complex(seeds[0])), complex(seeds[0]))
    root: RootResult = char_value(system, seeds, options.mode, options.tol_x, options.tol_f, options.max_iter)
    return ResonanceResult(
        omega=root.root,
        method=method,
        residual=root.residual,
        iterations=root.iterations,
        inputs={
            "epsilon": eps,
            "config": cfg.snapshot(),
            "shape": {"kind": boundary.curve.kind, "params": dict(boundary.curve.params)},
            "n": boundary.n,
            "mode": options.mode,
        },
    )


def assemble_system(omega: complex, boundary: DiscreteBoundary, cfg: PhysicalConfig, eps: float = 0.0,
                    upsample: bool = True) -> np.ndarray:
    if eps > 0:
        return assemble_coated_system(omega, boundary, eps, cfg, upsample)
    return assemble_uncoated_system(omega, boundary, cfg)


def multipole_matrix(omega: complex, R: float, eps: float, cfg: PhysicalConfig, n: int = 0) -> np.ndarray:
    """Sistema de coeficientes (a_n, b_n, c_n, d_n) para el círculo recubierto.

    Filas: continuidad de u en r=R y r=R+ε, flujo con δ_bl en r=R y con δ_lw en r=R+ε.
    Con ε = 0 devuelve el sistema reducido de dos medios (a_n, d_n).
    """
    if R <= 0:
        raise GeometryError("el radio debe ser positivo")
    if eps < 0:
        raise GeometryError("el espesor ε debe ser >= 0")
    k_b, k_l, k_w = cfg.wavenumbers(omega)
    J, Jp = specfun.bessel_j, specfun.bessel_j_deriv
    H, Hp = specfun.hankel1, specfun.hankel1_deriv

    if eps == 0:
        return np.array([
            [J(n, k_b * R), -H(n, k_w * R)],
            [k_b * Jp(n, k_b * R), -cfg.delta * k_w * Hp(n, k_w * R)],
        ], dtype=complex)

    Rd = R + eps
    d_bl = cfg.delta_bl
    d_lw = cfg.delta_lw
    return np.array([
        [J(n, k_b * R), -J(n, k_l * R), -H(n, k_l * R), 0.0],
        [0.0, J(n, k_l * Rd), H(n, k_l * Rd), -H(n, k_w * Rd)],
        [k_b * Jp(n, k_b * R), -d_bl * k_l * Jp(n, k_l * R), -d_bl * k_l * Hp(n, k_l * R), 0.0],
        [0.0, k_l * Jp(n, k_l * Rd), k_l * Hp(n, k_l * Rd), -d_lw * k_w * Hp(n, k_w * Rd)],
    ], dtype=complex)


def multipole_resonance(
    R: float,
    eps: float,
    cfg: PhysicalConfig,
    seeds: Optional[Sequence[complex]] = None,
    options: Optional[SolverOptions] = None,
) -> ResonanceResult:
    """Raíz de det A(ω) (modo n = 0) cerca de la resonancia de Minnaert."""
    options = options or SolverOptions()
    if seeds is None:
        q = circle_quantities(R)
        omega_M = minnaert_uncoated(q, cfg, options).omega
        guess = coated_shift(omega_M, q, cfg, eps).omega if eps > 0 else omega_M
        seeds = seeds_around(guess)
    root = char_value(
        lambda w: multipole_matrix(w, R, eps, cfg),
        seeds,
        "det",
        options.tol_x,
        options.tol_f,
        options.max_iter,
    )
    logger.info("Multipolo: ω̂ = %s (ε=%g, %d iteraciones)", root.root, eps, root.iterations)
    return ResonanceResult(
        omega=root.root,
        method="multipole",
        residual=root.residual,
        iterations=root.iterations,
        inputs={"epsilon": float(eps), "config": cfg.snapshot(),
                "shape": {"kind": "circle", "params": {"r": R}}},
    )
