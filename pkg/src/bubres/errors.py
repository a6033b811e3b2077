"""Excepciones de bubres.

Los errores de configuración terminan el CLI con código 2 y los numéricos con código 3.
"""
from __future__ import annotations

from typing import Any, Dict, List, Optional


class BubresError(Exception):
    """Raíz de todos los errores del paquete."""

    exit_code = 1


class ConfigError(BubresError, ValueError):
    """Configuración inválida o JSON mal formado; `issues` guarda los problemas de validación."""

    exit_code = 2

    def __init__(self, message: str, issues: Optional[List[Dict]] = None):
        super().__init__(message)
        self.issues = list(issues or [])


class NumericalError(BubresError):
    """Fallo numérico: dominio, geometría, solver."""

    exit_code = 3


class SpecialFunctionDomainError(NumericalError, ValueError):
    pass


class GeometryError(NumericalError, ValueError):
    pass


class NearSingularityError(NumericalError):
    """La distancia entre fronteras es demasiado pequeña para la cuadratura simple."""


class DegenerateKernelError(NumericalError):
    """El núcleo de (-1/2 I + K*) no es numéricamente de dimensión 1."""


class SpectralToleranceError(NumericalError):
    """ψ0 no anula (-1/2 I + K*) o S_D[ψ0] no es constante dentro de tolerancia."""


class SingularDenominatorError(NumericalError, ZeroDivisionError):
    pass


class WrongBranchError(NumericalError):
    """La raíz encontrada no es física (Re ω <= 0 o Im ω > 0)."""


class ConvergenceError(NumericalError):
    """El buscador de raíces no convergió; `result` guarda el último estado."""

    def __init__(self, message: str, result: Any = None):
        super().__init__(message)
        self.result = result
