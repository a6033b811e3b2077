from dataclasses import dataclass
from pathlib import Path
import os


@dataclass
class Settings:
    output_dir: Path
    log_level: str
    tol_x: float
    tol_f: float
    max_iter: int
    workers: int


def _float_env(name: str, default: float) -> float:
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        return default


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def get_settings() -> Settings:
    """Lee configuración desde variables de entorno o valores por defecto.

    - BUBRES_OUTPUT_DIR: carpeta donde se escriben CSV, scripts y volcados.
    - BUBRES_LOG_LEVEL: nivel de logging (DEBUG, INFO, WARNING...).
    - BUBRES_TOL_X / BUBRES_TOL_F: tolerancias por defecto del método de Muller.
    - BUBRES_MAX_ITER: máximo de iteraciones del buscador de raíces.
    - BUBRES_WORKERS: procesos para los barridos (1 = secuencial con arranque en caliente).

    Si un valor numérico no se puede interpretar, se usa el valor por defecto.
    """
    default_output = Path.cwd() / "bubres_output"
    output_dir = Path(os.getenv("BUBRES_OUTPUT_DIR", default_output))

    log_level = os.getenv("BUBRES_LOG_LEVEL", "WARNING").strip().upper() or "WARNING"

    return Settings(
        output_dir=output_dir,
        log_level=log_level,
        tol_x=_float_env("BUBRES_TOL_X", 1e-10),
        tol_f=_float_env("BUBRES_TOL_F", 1e-10),
        max_iter=_int_env("BUBRES_MAX_ITER", 60),
        workers=max(1, _int_env("BUBRES_WORKERS", 1)),
    )
