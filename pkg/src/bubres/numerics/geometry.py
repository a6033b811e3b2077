"""Curvas paramétricas cerradas, curvas desplazadas (recubrimiento) y su discretización.

Todas las formas de la biblioteca son series de Fourier finitas
z(t) = Σ C_m e^{imt} (en notación compleja), así que las derivadas son exactas.
Convenciones:
  - orientación antihoraria (se invierte al construir si el área con signo es negativa);
  - ν es la normal exterior, T la tangente unitaria;
  - curvatura con signo τ definida por d²x/ds² = -τ ν (positiva en curvas convexas).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from ..errors import GeometryError

MIN_NODES = 16
_CHECK_SAMPLES = 4096


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]


def _as_xy(z: np.ndarray) -> np.ndarray:
    return np.stack([z.real, z.imag], axis=-1)


class ParametricCurve:
    """Frontera cerrada y regular parametrizada en t ∈ [0, 2π)."""

    kind: str = "curve"
    params: Dict[str, object]
    offset: float = 0.0

    def position(self, t) -> np.ndarray:
        raise NotImplementedError

    def d1(self, t) -> np.ndarray:
        raise NotImplementedError

    def d2(self, t) -> np.ndarray:
        raise NotImplementedError

    def speed(self, t) -> np.ndarray:
        return np.linalg.norm(self.d1(t), axis=-1)

    def tangent(self, t) -> np.ndarray:
        d1 = self.d1(t)
        return d1 / np.linalg.norm(d1, axis=-1)[..., None]

    def normal(self, t) -> np.ndarray:
        tan = self.tangent(t)
        return np.stack([tan[..., 1], -tan[..., 0]], axis=-1)

    def curvature(self, t) -> np.ndarray:
        d1 = self.d1(t)
        d2 = self.d2(t)
        return _cross(d1, d2) / np.linalg.norm(d1, axis=-1) ** 3

    def signed_area(self, samples: int = 256) -> float:
        t = 2.0 * np.pi * np.arange(samples) / samples
        return float(0.5 * np.sum(_cross(self.position(t), self.d1(t))) * 2.0 * np.pi / samples)

    def _check_regular(self) -> None:
        t = 2.0 * np.pi * np.arange(_CHECK_SAMPLES) / _CHECK_SAMPLES
        if np.min(self.speed(t)) <= 1e-12:
            raise GeometryError(f"parametrización no regular ({self.kind})")


class FourierCurve(ParametricCurve):
    """Curva z(t) = Σ_m C_m e^{imt} con derivadas exactas hasta orden 3."""

    def __init__(
        self,
        modes: Iterable[int],
        coeffs: Iterable[complex],
        kind: str = "fourier",
        params: Optional[Mapping[str, object]] = None,
    ):
        modes = np.asarray(list(modes), dtype=int)
        coeffs = np.asarray(list(coeffs), dtype=complex)
        if modes.shape != coeffs.shape or modes.size == 0:
            raise GeometryError("modos y coeficientes de Fourier deben tener la misma longitud (> 0)")
        # Área con signo = π Σ m |C_m|^2; si es negativa se recorre al revés (t -> -t).
        area = np.pi * float(np.sum(modes * np.abs(coeffs) ** 2))
        if area == 0:
            raise GeometryError("la curva no encierra área")
        if area < 0:
            modes = -modes
        self.modes = modes
        self.coeffs = coeffs
        self.kind = kind
        self.params = dict(params or {})
        self.offset = 0.0
        self._check_regular()

    def _derivative(self, t, order: int) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        phase = np.exp(1j * np.multiply.outer(t, self.modes))
        factor = (1j * self.modes) ** order
        return _as_xy(phase @ (factor * self.coeffs))

    def position(self, t) -> np.ndarray:
        return self._derivative(t, 0)

    def d1(self, t) -> np.ndarray:
        return self._derivative(t, 1)

    def d2(self, t) -> np.ndarray:
        return self._derivative(t, 2)

    def d3(self, t) -> np.ndarray:
        return self._derivative(t, 3)


class OffsetCurve(ParametricCurve):
    """Curva p(x) = x + εν_x sobre una curva de Fourier (frontera exterior del recubrimiento)."""

    def __init__(self, base: FourierCurve, eps: float):
        self.base = base
        self.offset = float(eps)
        self.kind = base.kind
        self.params = dict(base.params)
        self._check_regular()

    def position(self, t) -> np.ndarray:
        return self.base.position(t) + self.offset * self.base.normal(t)

    def d1(self, t) -> np.ndarray:
        # x_d' = |x'| (1 + ετ) T
        scale = self.base.speed(t) * (1.0 + self.offset * self.base.curvature(t))
        return scale[..., None] * self.base.tangent(t)

    def d2(self, t) -> np.ndarray:
        b1, b2, b3 = self.base.d1(t), self.base.d2(t), self.base.d3(t)
        speed2 = _dot(b1, b1)
        # g = τ|x'| ; ν' = g T ; T' = -g ν
        g = _cross(b1, b2) / speed2
        g_prime = _cross(b1, b3) / speed2 - 2.0 * _cross(b1, b2) * _dot(b1, b2) / speed2 ** 2
        tan = self.base.tangent(t)
        nor = self.base.normal(t)
        nu_second = g_prime[..., None] * tan - (g * g)[..., None] * nor
        return b2 + self.offset * nu_second


def circle(r: float, center: Tuple[float, float] = (0.0, 0.0)) -> FourierCurve:
    if r <= 0:
        raise GeometryError("el radio debe ser positivo")
    c0 = complex(center[0], center[1])
    return FourierCurve([0, 1], [c0, r], kind="circle", params={"r": r, "center": tuple(center)})


def ellipse(a: float, b: float, center: Tuple[float, float] = (0.0, 0.0)) -> FourierCurve:
    if a <= 0 or b <= 0:
        raise GeometryError("los semiejes deben ser positivos")
    c0 = complex(center[0], center[1])
    # a cos t + i b sin t = (a+b)/2 e^{it} + (a-b)/2 e^{-it}
    return FourierCurve(
        [0, 1, -1],
        [c0, 0.5 * (a + b), 0.5 * (a - b)],
        kind="ellipse",
        params={"a": a, "b": b, "center": tuple(center)},
    )


def star(r0: float, amplitude: float, lobes: int) -> FourierCurve:
    """r(t) = r0 + amplitude·cos(lobes·t)."""
    if r0 <= 0 or abs(amplitude) >= r0 or lobes < 1:
        raise GeometryError("estrella inválida: se requiere r0 > |amplitude| y lobes >= 1")
    half = 0.5 * amplitude
    return FourierCurve(
        [1, lobes + 1, 1 - lobes],
        [r0, half, half],
        kind="star",
        params={"r0": r0, "amplitude": amplitude, "lobes": lobes},
    )


def fourier_curve(coefficients: Mapping[int, complex]) -> FourierCurve:
    """Curva definida por el usuario: {m: C_m}."""
    modes = list(coefficients.keys())
    return FourierCurve(modes, [coefficients[m] for m in modes], kind="fourier",
                        params={"coefficients": dict(coefficients)})


def curve_from_params(kind: str, params: Mapping[str, object]) -> FourierCurve:
    """Construye una curva a partir de la especificación {kind, params} del config."""
    kind = str(kind).strip().lower()
    try:
        if kind == "circle":
            return circle(float(params["r"]), tuple(params.get("center", (0.0, 0.0))))
        if kind == "ellipse":
            return ellipse(float(params["a"]), float(params["b"]), tuple(params.get("center", (0.0, 0.0))))
        if kind == "star":
            return star(float(params["r0"]), float(params["amplitude"]), int(params["lobes"]))
        if kind == "fourier":
            raw = params["coefficients"]
            coeffs = {int(m): complex(v[0], v[1]) for m, v in raw}
            return fourier_curve(coeffs)
    except KeyError as exc:
        raise GeometryError(f"forma '{kind}': falta el parámetro {exc}") from exc
    raise GeometryError(f"forma desconocida: {kind}")


def signed_curvature(curve: ParametricCurve, t: float) -> float:
    """τ(t) con la convención d²x/ds² = -τν."""
    return float(curve.curvature(np.asarray(float(t))))


def max_curvature(curve: ParametricCurve, samples: int = _CHECK_SAMPLES) -> float:
    t = 2.0 * np.pi * np.arange(samples) / samples
    return float(np.max(curve.curvature(t)))


def offset_curve(curve: ParametricCurve, eps: float) -> ParametricCurve:
    """Curva desplazada x + εν; ε = 0 devuelve la misma curva."""
    eps = float(eps)
    if eps < 0:
        raise GeometryError("el espesor ε debe ser >= 0")
    if eps == 0:
        return curve
    if not isinstance(curve, FourierCurve):
        raise GeometryError("solo se puede desplazar una curva de Fourier")
    tau_max = max_curvature(curve)
    if tau_max > 0 and eps * tau_max >= 1.0:
        raise GeometryError(f"ε={eps} >= 1/max τ={1.0 / tau_max:.6g}: la curva desplazada se autointersecta")
    return OffsetCurve(curve, eps)


@dataclass(frozen=True)
class DiscreteBoundary:
    """Nodos de cuadratura trapezoidal sobre una curva (malla de Nyström)."""

    n: int
    t: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    normals: np.ndarray
    tangents: np.ndarray
    curvature: np.ndarray
    speed: np.ndarray
    curve: ParametricCurve = field(repr=False)
    offset: float = 0.0

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.weights))

    @property
    def max_spacing(self) -> float:
        gaps = np.linalg.norm(np.roll(self.nodes, -1, axis=0) - self.nodes, axis=1)
        return float(np.max(gaps))

    def inner(self, f, g) -> complex:
        """<f, g> = Σ w_i f_i conj(g_i)."""
        return complex(np.sum(self.weights * np.asarray(f) * np.conj(np.asarray(g))))

    def norm(self, f) -> float:
        return float(np.sqrt(abs(self.inner(f, f))))


def discretize(curve: ParametricCurve, n: int) -> DiscreteBoundary:
    """Nodos t_i = 2πi/n con pesos |x'(t_i)|·2π/n."""
    if n % 2 != 0 or n < MIN_NODES:
        raise GeometryError(f"n debe ser par y >= {MIN_NODES} (n={n})")
    t = 2.0 * np.pi * np.arange(n) / n
    speed = curve.speed(t)
    return DiscreteBoundary(
        n=n,
        t=t,
        nodes=curve.position(t),
        weights=speed * (2.0 * np.pi / n),
        normals=curve.normal(t),
        tangents=curve.tangent(t),
        curvature=curve.curvature(t),
        speed=speed,
        curve=curve,
        offset=curve.offset,
    )


def enclosed_area(boundary: DiscreteBoundary) -> float:
    """Vol(D) = (1/2)∮<x, ν> dσ."""
    return float(0.5 * np.sum(boundary.weights * _dot(boundary.nodes, boundary.normals)))
