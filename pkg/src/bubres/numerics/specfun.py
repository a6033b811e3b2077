"""Funciones de Bessel/Hankel de argumento complejo y coeficientes de la expansión
logarítmica de la solución fundamental de Helmholtz en 2D.

Las funciones públicas (`bessel_j`, `hankel1`, `hankel1_deriv`) delegan en
`scipy.special` después de validar el dominio. `hankel1_series` y
`hankel1_asymptotic` son evaluadores independientes (serie ascendente y
expansión asintótica de Hankel) que sirven para contrastar la zona de cruce.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy import special

from ..errors import SpecialFunctionDomainError

MAX_ORDER = 10
OVERFLOW_GUARD = 700.0
CROSSOVER_RADIUS = 12.0
EULER_GAMMA = float(np.euler_gamma)


@dataclass(frozen=True)
class ExpansionCoeffs:
    """Coeficientes de -(i/4)H0(kr) = (1/2π)ln r + η_k + Σ (b_j ln(kr) + c_j)(kr)^{2j}."""

    k: complex
    eta_k: complex
    b: np.ndarray
    c: np.ndarray
    euler_gamma: float = EULER_GAMMA

    @property
    def j_max(self) -> int:
        return len(self.b)


def _check_order(n: int, max_order: int = MAX_ORDER) -> None:
    if int(n) != n or n < 0 or n > max_order:
        raise SpecialFunctionDomainError(f"orden fuera de rango: n={n} (0 <= n <= {max_order})")


def _check_entire_arg(z: np.ndarray) -> None:
    if np.any(~np.isfinite(z)) or np.any(np.abs(z) >= OVERFLOW_GUARD):
        raise SpecialFunctionDomainError(f"|z| debe ser < {OVERFLOW_GUARD}")


def _check_hankel_arg(z: np.ndarray) -> None:
    _check_entire_arg(z)
    if np.any(z == 0):
        raise SpecialFunctionDomainError("H_n(z) no está definida en z = 0")
    on_cut = (z.imag == 0) & (z.real < 0)
    if np.any(on_cut):
        raise SpecialFunctionDomainError("z está sobre el corte del logaritmo (eje real negativo)")
    if np.any(z.imag < -np.abs(z.real)):
        raise SpecialFunctionDomainError("se requiere Im z >= -|Re z|")


def _scalar_or_array(value: np.ndarray, was_scalar: bool):
    if was_scalar:
        return complex(value)
    return value


def bessel_j(n: int, z):
    """J_n(z) para argumento complejo (escalar o arreglo)."""
    _check_order(n)
    was_scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=complex)
    _check_entire_arg(zz)
    return _scalar_or_array(special.jv(n, zz), was_scalar)


def hankel1(n: int, z):
    """H_n^{(1)}(z) = J_n(z) + iY_n(z) en la rama principal."""
    _check_order(n)
    was_scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=complex)
    _check_hankel_arg(zz)
    return _scalar_or_array(special.hankel1(n, zz), was_scalar)


def hankel1_deriv(n: int, z):
    """Derivada de H_n^{(1)}: H0' = -H1 y H_n' = (H_{n-1} - H_{n+1})/2."""
    _check_order(n)
    was_scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=complex)
    _check_hankel_arg(zz)
    if n == 0:
        value = -special.hankel1(1, zz)
    else:
        value = 0.5 * (special.hankel1(n - 1, zz) - special.hankel1(n + 1, zz))
    return _scalar_or_array(value, was_scalar)


def bessel_j_deriv(n: int, z):
    """Derivada de J_n con la misma recurrencia que `hankel1_deriv`."""
    _check_order(n)
    was_scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=complex)
    _check_entire_arg(zz)
    if n == 0:
        value = -special.jv(1, zz)
    else:
        value = 0.5 * (special.jv(n - 1, zz) - special.jv(n + 1, zz))
    return _scalar_or_array(value, was_scalar)


def _digamma_int(m: int) -> float:
    # ψ(m + 1) = -γ + H_m
    return -EULER_GAMMA + sum(1.0 / j for j in range(1, m + 1))


def hankel1_series(n: int, z: complex, max_terms: int = 300) -> complex:
    """H_n^{(1)} por las series ascendentes de J_n e Y_n (zona |z| <= 12)."""
    _check_order(n)
    z = complex(z)
    _check_hankel_arg(np.asarray(z))
    half = z / 2.0
    q = -half * half

    term = half ** n / math.factorial(n)
    j_sum = 0j
    y_sum = 0j
    peak = abs(term)
    for k in range(max_terms):
        if k > 0:
            term *= q / (k * (n + k))
        j_sum += term
        y_sum += (_digamma_int(k) + _digamma_int(n + k)) * term
        peak = max(peak, abs(term))
        if k > abs(z) and abs(term) < 1e-17 * peak:
            break

    finite = 0j
    for k in range(n):
        finite += math.factorial(n - k - 1) / math.factorial(k) * half ** (2 * k - n)

    y_val = (2.0 / np.pi) * j_sum * np.log(half) - finite / np.pi - y_sum / np.pi
    return complex(j_sum + 1j * y_val)


def hankel1_asymptotic(n: int, z: complex, max_terms: int = 60) -> complex:
    """H_n^{(1)} por la expansión asintótica de Hankel, truncada en el término mínimo."""
    _check_order(n)
    z = complex(z)
    _check_hankel_arg(np.asarray(z))
    mu = 4.0 * n * n
    total = 1.0 + 0j
    coeff = 1.0 + 0j
    last = 1.0
    for k in range(1, max_terms):
        coeff *= 1j * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        size = abs(coeff)
        if size > last:
            break
        total += coeff
        last = size
        if size < 1e-17:
            break
    phase = z - n * np.pi / 2.0 - np.pi / 4.0
    return complex(np.sqrt(2.0 / (np.pi * z)) * np.exp(1j * phase) * total)


def hankel1_piecewise(n: int, z: complex, crossover: float = CROSSOVER_RADIUS) -> complex:
    """Serie para |z| <= crossover, expansión asintótica fuera."""
    if abs(z) <= crossover:
        return hankel1_series(n, z)
    return hankel1_asymptotic(n, z)


def eta(k: complex) -> complex:
    """η_k = (1/2π)(ln k + γ - ln 2) - i/4, con ln en la rama principal."""
    k = complex(k)
    if k == 0 or (k.imag == 0 and k.real < 0):
        raise SpecialFunctionDomainError(f"η_k no está definida para k={k}")
    return complex((np.log(k) + EULER_GAMMA - np.log(2.0)) / (2.0 * np.pi) - 0.25j)


def expansion_coeffs(k: complex, j_max: int) -> ExpansionCoeffs:
    """η_k, b_j y c_j (j = 1..j_max) de la expansión logarítmica de Hankel."""
    if j_max < 1:
        raise ValueError("j_max debe ser >= 1")
    eta_k = eta(k)
    j = np.arange(1, j_max + 1)
    fact = special.factorial(j, exact=False)
    b = (-1.0) ** j / (2.0 * np.pi * 4.0 ** j * fact ** 2)
    harmonic = np.cumsum(1.0 / j)
    c = b * (EULER_GAMMA - np.log(2.0) - 0.5j * np.pi - harmonic)
    return ExpansionCoeffs(k=complex(k), eta_k=eta_k, b=b, c=c.astype(complex))


def truncated_fundamental(k: complex, r, coeffs: ExpansionCoeffs):
    """Evalúa la expansión truncada (1/2π)ln r + η_k + Σ_{j<=j_max}(b_j ln(kr)+c_j)(kr)^{2j}."""
    r = np.asarray(r, dtype=float)
    kr = complex(k) * r
    value = np.log(r) / (2.0 * np.pi) + coeffs.eta_k
    for idx in range(coeffs.j_max):
        value = value + (coeffs.b[idx] * np.log(kr) + coeffs.c[idx]) * kr ** (2 * (idx + 1))
    return value
