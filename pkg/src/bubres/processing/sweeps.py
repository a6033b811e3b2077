"""Barridos en ε o en δ: fórmula asintótica contra multipolo (círculos) y/o BEM."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..errors import BubresError
from ..numerics.geometry import DiscreteBoundary
from ..numerics.layerpot import SpectralQuantities
from ..numerics.rootfind import seeds_around
from .resonance import (
    PhysicalConfig,
    SolverOptions,
    bem_resonance,
    coated_shift,
    minnaert_uncoated,
    multipole_resonance,
)

logger = logging.getLogger(__name__)

VARIABLES = ("eps", "delta")
METHOD_CHOICES = ("formula", "multipole", "bem", "all")
NAN = complex(np.nan, np.nan)


@dataclass
class SweepRecord:
    variable: str
    value: float
    omega_M: complex = NAN
    omega_formula: complex = NAN
    omega_multipole: complex = NAN
    omega_bem: complex = NAN
    relative_error: float = float("nan")
    status: str = "ok"

    @property
    def failed(self) -> bool:
        return self.status != "ok"

    def to_row(self) -> Dict[str, object]:
        """Fila plana: cada complejo en dos columnas (re, im)."""
        row: Dict[str, object] = {"variable": self.variable, "value": self.value}
        for name in ("omega_M", "omega_formula", "omega_multipole", "omega_bem"):
            z = complex(getattr(self, name))
            row[f"{name}_re"] = z.real
            row[f"{name}_im"] = z.imag
        row["relative_error"] = self.relative_error
        row["status"] = self.status
        return row


@dataclass(frozen=True)
class SweepPlan:
    variable: str
    values: Sequence[float]
    boundary: DiscreteBoundary
    quantities: SpectralQuantities
    physics: PhysicalConfig
    epsilon: float = 0.0
    method: str = "all"
    options: SolverOptions = SolverOptions()

    @property
    def is_circle(self) -> bool:
        return self.boundary.curve.kind == "circle"

    @property
    def radius(self) -> float:
        return float(self.boundary.curve.params["r"])

    @property
    def run_multipole(self) -> bool:
        return self.is_circle and self.method in ("formula", "multipole", "all")

    @property
    def run_bem(self) -> bool:
        return self.method in ("bem", "all")

    @property
    def reference(self) -> str:
        """Columna contra la que se mide relative_error."""
        if self.run_multipole:
            return "multipole"
        if self.run_bem:
            return "bem"
        return "none"


def physics_at(plan: SweepPlan, value: float) -> PhysicalConfig:
    """Configuración física del punto: en barridos de δ se cambia ρ_b con v_b fija."""
    if plan.variable == "eps":
        return plan.physics
    base = plan.physics
    rho_b = float(value) * base.rho_w
    return replace(base, rho_b=rho_b, kappa_b=rho_b * base.v_b ** 2)


def _relative_error(formula: complex, reference: complex) -> float:
    if not np.isfinite(reference) or reference == 0:
        return float("nan")
    return float(abs(formula - reference) / abs(reference))


def evaluate_point(
    plan: SweepPlan,
    value: float,
    warm: Optional[Dict[str, complex]] = None,
) -> SweepRecord:
    """Resuelve un punto del barrido; `warm` trae las raíces del punto anterior."""
    warm = warm or {}
    cfg = physics_at(plan, value)
    eps = float(value) if plan.variable == "eps" else plan.epsilon
    record = SweepRecord(variable=plan.variable, value=float(value))

    omega_M = minnaert_uncoated(plan.quantities, cfg, plan.options).omega
    omega_f = coated_shift(omega_M, plan.quantities, cfg, eps).omega
    record.omega_M = omega_M
    record.omega_formula = omega_f

    if plan.run_multipole:
        seeds = seeds_around(warm.get("multipole", omega_f))
        record.omega_multipole = multipole_resonance(plan.radius, eps, cfg, seeds, plan.options).omega
    if plan.run_bem:
        seeds = seeds_around(warm.get("bem", omega_f))
        record.omega_bem = bem_resonance(plan.boundary, cfg, eps, seeds, plan.options).omega

    reference = {"multipole": record.omega_multipole, "bem": record.omega_bem}.get(plan.reference, NAN)
    record.relative_error = _relative_error(omega_f, reference)
    return record


def _failure(plan: SweepPlan, value: float, exc: Exception) -> SweepRecord:
    logger.warning("Barrido %s=%g: %s", plan.variable, value, exc)
    return SweepRecord(variable=plan.variable, value=float(value), status=f"failed: {exc}")


def _evaluate_isolated(args) -> SweepRecord:
    plan, value = args
    try:
        return evaluate_point(plan, value)
    except BubresError as exc:
        return _failure(plan, value, exc)


def run_sweep(plan: SweepPlan, workers: int = 1) -> List[SweepRecord]:
    """Un SweepRecord por valor, en el orden de entrada.

    Secuencial (workers = 1): los barridos en ε arrancan cada punto desde las
    raíces del anterior y el primer fallo cierra el barrido con una fila marcada.
    Con workers > 1 los puntos son independientes y cada fallo deja su propia fila.
    """
    if plan.variable not in VARIABLES:
        raise ValueError(f"variable de barrido desconocida: {plan.variable}")
    if plan.method not in METHOD_CHOICES:
        raise ValueError(f"método desconocido: {plan.method}")
    values = [float(v) for v in plan.values]
    logger.info("Barrido en %s: %d puntos, referencia=%s, workers=%d",
                plan.variable, len(values), plan.reference, workers)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(_evaluate_isolated, [(plan, v) for v in values]))

    records: List[SweepRecord] = []
    warm: Dict[str, complex] = {}
    for value in values:
        try:
            record = evaluate_point(plan, value, warm if plan.variable == "eps" else None)
        except BubresError as exc:
            records.append(_failure(plan, value, exc))
            break
        records.append(record)
        warm = {
            name: root
            for name, root in (("multipole", record.omega_multipole), ("bem", record.omega_bem))
            if np.isfinite(root)
        }
    return records


def sweep_values(start: float, stop: float, num: int, spacing: str = "linear") -> np.ndarray:
    """Rejilla lineal o logarítmica (extremos incluidos)."""
    if spacing == "log":
        return np.logspace(np.log10(start), np.log10(stop), int(num))
    return np.linspace(start, stop, int(num))
