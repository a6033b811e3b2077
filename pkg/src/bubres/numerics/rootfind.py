"""Búsqueda de raíces en el plano complejo (método de Muller) y de valores
característicos de funciones matriciales analíticas.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Callable, List, Sequence

import numpy as np
from scipy import linalg

from ..errors import ConvergenceError

logger = logging.getLogger(__name__)

DEFAULT_TOL_X = 1e-10
DEFAULT_TOL_F = 1e-10
DEFAULT_MAX_ITER = 60
SEED_FACTORS = (0.95, 1.0, 1.05)
ILL_CONDITIONED = 1e-14
MODES = ("det", "inv_sigma_min")


@dataclass
class RootResult:
    root: complex
    residual: float
    iterations: int
    converged: bool
    history: List[complex] = field(default_factory=list)

    def observed_order(self, exact: complex = None, floor: float = 1e-13) -> List[float]:
        """Estimaciones log(e_{k+1}/e_k)/log(e_k/e_{k-1}) del orden de convergencia.

        Se descartan los tríos con algún error por debajo de floor·max(1, |raíz|) (ruido de redondeo).
        """
        ref = self.root if exact is None else exact
        errors = [abs(z - ref) for z in self.history]
        cutoff = floor * max(1.0, abs(ref))
        orders = []
        for prev, cur, nxt in zip(errors, errors[1:], errors[2:]):
            if min(prev, cur, nxt) <= cutoff or cur >= prev:
                continue
            orders.append(float(np.log(nxt / cur) / np.log(cur / prev)))
        return orders


def seeds_around(guess: complex, factors: Sequence[float] = SEED_FACTORS) -> List[complex]:
    """Semillas {0.95, 1.0, 1.05}·guess."""
    return [complex(f * guess) for f in factors]


def muller(
    f: Callable[[complex], complex],
    seeds: Sequence[complex],
    tol_x: float = DEFAULT_TOL_X,
    tol_f: float = DEFAULT_TOL_F,
    max_iter: int = DEFAULT_MAX_ITER,
    raise_on_failure: bool = True,
) -> RootResult:
    """Método de Muller: raíz de la parábola por los tres últimos iterados más cercana al último.

    Converge cuando |f(x)| <= tol_f y el último paso es <= tol_x·|x|. Si la
    parábola degenera se toma un paso de secante.
    """
    if len(seeds) != 3:
        raise ValueError("Muller necesita exactamente tres semillas")
    x0, x1, x2 = (complex(s) for s in seeds)
    if len({x0, x1, x2}) != 3:
        raise ValueError("las semillas deben ser distintas")
    f0, f1, f2 = complex(f(x0)), complex(f(x1)), complex(f(x2))
    history = [x0, x1, x2]
    step = np.inf

    for iteration in range(1, max_iter + 1):
        if f2 == 0:
            return RootResult(x2, 0.0, iteration - 1, True, history)
        h1 = x1 - x0
        h2 = x2 - x1
        d1 = (f1 - f0) / h1
        d2 = (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = np.sqrt(b * b - 4.0 * a * f2 + 0j)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        if den == 0 or not np.isfinite(den):
            if d2 == 0:
                break
            # parábola degenerada: paso de secante
            step = -f2 / d2
        else:
            step = -2.0 * f2 / den
        x3 = x2 + step
        f3 = complex(f(x3))
        history.append(x3)
        logger.debug("Muller it=%d x=%s |f|=%.3e |paso|=%.3e", iteration, x3, abs(f3), abs(step))
        x0, x1, x2 = x1, x2, x3
        f0, f1, f2 = f1, f2, f3
        if abs(f3) <= tol_f and abs(step) <= tol_x * abs(x3):
            return RootResult(x3, abs(f3), iteration, True, history)

    result = RootResult(x2, abs(f2), len(history) - 3, False, history)
    if raise_on_failure:
        raise ConvergenceError(
            f"Muller no convergió en {max_iter} iteraciones (x={x2}, |f|={abs(f2):.3e})", result
        )
    return result


def _normalized_det(matrix_fn: Callable[[complex], np.ndarray], reference: complex) -> Callable[[complex], complex]:
    sign0, log0 = np.linalg.slogdet(matrix_fn(reference))
    if sign0 == 0:
        raise ConvergenceError("la matriz es singular en la semilla de referencia")

    def f(omega: complex) -> complex:
        sign, logdet = np.linalg.slogdet(matrix_fn(omega))
        return complex(sign / sign0 * np.exp(logdet - log0))

    return f


def sigma_ratio(matrix: np.ndarray) -> float:
    """σ_min/σ_max de una matriz."""
    sigma = linalg.svdvals(matrix)
    return float(sigma[-1] / sigma[0])


def _sigma_gradient(matrix_fn: Callable[[complex], np.ndarray], rel_step: float) -> Callable[[complex], complex]:
    """g(ω) = ∂σ²/∂x + i ∂σ²/∂y por diferencias centradas; se anula en el mínimo de σ_min."""

    def sigma2(omega: complex) -> float:
        return float(linalg.svdvals(matrix_fn(omega))[-1] ** 2)

    def g(omega: complex) -> complex:
        h = rel_step * max(abs(omega), 1e-300)
        dx = (sigma2(omega + h) - sigma2(omega - h)) / (2.0 * h)
        dy = (sigma2(omega + 1j * h) - sigma2(omega - 1j * h)) / (2.0 * h)
        return complex(dx, dy)

    return g


def char_value(
    matrix_fn: Callable[[complex], np.ndarray],
    seeds: Sequence[complex],
    mode: str = "inv_sigma_min",
    tol_x: float = DEFAULT_TOL_X,
    tol_f: float = DEFAULT_TOL_F,
    max_iter: int = DEFAULT_MAX_ITER,
    fd_step: float = 1e-6,
) -> RootResult:
    """Valor característico de ω ↦ F(ω) cerca de las semillas.

    mode="det": Muller sobre det F(ω)/det F(seed0).
    mode="inv_sigma_min": Muller sobre el gradiente (diferencias finitas) de σ_min²;
    el residuo devuelto es σ_min/σ_max en la raíz.
    """
    if mode not in MODES:
        raise ValueError(f"modo desconocido: {mode} (use {MODES})")

    if mode == "det":
        result = muller(_normalized_det(matrix_fn, seeds[0]), seeds, tol_x, tol_f, max_iter)
        return result

    gradient = _sigma_gradient(matrix_fn, fd_step)
    # el gradiente tiene escala arbitraria: se normaliza con su valor en la primera semilla
    scale = abs(gradient(complex(seeds[0]))) or 1.0
    result = muller(lambda w: gradient(w) / scale, seeds, tol_x, np.inf, max_iter, raise_on_failure=False)
    ratio = sigma_ratio(matrix_fn(result.root))
    result.residual = ratio
    result.converged = result.converged and ratio <= tol_f
    if not result.converged:
        raise ConvergenceError(
            f"σ_min/σ_max = {ratio:.3e} en ω={result.root} (tol_f={tol_f:.1e})", result
        )
    return result


def check_conditioning(matrix: np.ndarray, where: complex) -> float:
    """Registra un aviso si σ_min/σ_max < 1e-14 lejos de la raíz."""
    ratio = sigma_ratio(matrix)
    if ratio < ILL_CONDITIONED:
        logger.warning("Matriz mal condicionada en ω=%s: σ_min/σ_max=%.2e", where, ratio)
    return ratio
