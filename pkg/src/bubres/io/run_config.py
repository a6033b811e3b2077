from __future__ import annotations

from dataclasses import dataclass, field
import hashlib
import json
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

from ..config import Settings
from ..errors import ConfigError
from ..numerics.geometry import FourierCurve, curve_from_params
from ..processing.resonance import PhysicalConfig, SolverOptions
from ..processing.sweeps import sweep_values
from ..processing.validation import validate_run_config

DEFAULT_N = 128


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: Tuple[float, ...]


@dataclass
class RunConfig:
    """Corrida ya validada: forma, física, recubrimiento, barrido y opciones del solver."""

    shape_kind: str
    shape_params: Dict[str, object]
    n: int
    physics: PhysicalConfig
    epsilon: Optional[float]
    sweep: Optional[SweepSpec]
    method: str
    options: SolverOptions
    raw: Dict[str, object] = field(repr=False)
    issues: List[Dict] = field(default_factory=list, repr=False)

    @property
    def config_hash(self) -> str:
        return config_hash(self.raw)

    def curve(self) -> FourierCurve:
        return curve_from_params(self.shape_kind, self.shape_params)


def config_hash(raw: Mapping) -> str:
    """SHA-256 del JSON canónico (claves ordenadas, sin espacios)."""
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def read_config_json(path: Path) -> Dict[str, object]:
    """Lee el JSON; los errores de sintaxis se reportan con línea y columna."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"No se encontró el archivo de configuración: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: JSON inválido en línea {exc.lineno}, columna {exc.colno}: {exc.msg}") from exc


def _physics(block: Mapping) -> PhysicalConfig:
    if "kappa_b" in block:
        return PhysicalConfig(**{k: float(block[k]) for k in
                                 ("rho_b", "rho_l", "rho_w", "kappa_b", "kappa_l", "kappa_w")})
    v_w = float(block["v_w"])
    return PhysicalConfig.from_contrasts(
        v_b=float(block["v_b"]),
        v_l=float(block.get("v_l", v_w)),
        v_w=v_w,
        delta=float(block["delta"]),
        delta_lw=float(block.get("delta_lw", 1.0)),
        rho_w=float(block.get("rho_w", 1.0)),
    )


def _sweep(block: Optional[Mapping]) -> Optional[SweepSpec]:
    if block is None:
        return None
    if "values" in block:
        values = [float(v) for v in block["values"]]
    else:
        values = sweep_values(float(block["start"]), float(block["stop"]), int(block["num"]),
                              block.get("spacing", "linear")).tolist()
    return SweepSpec(variable=str(block["variable"]), values=tuple(values))


def build_run_config(raw: Mapping, settings: Optional[Settings] = None) -> RunConfig:
    """Construye un RunConfig; las tolerancias del JSON pisan las de Settings."""
    issues = validate_run_config(raw)
    errors = [i for i in issues if i["level"] == "ERROR"]
    if errors:
        summary = "; ".join(f"{i['code']}: {i['message']}" for i in errors)
        raise ConfigError(f"Configuración inválida: {summary}", issues)

    shape = raw["shape"]
    tolerances = raw.get("tolerances", {})
    bem = raw.get("bem", {})
    defaults = SolverOptions()
    options = SolverOptions(
        tol_x=float(tolerances.get("tol_x", settings.tol_x if settings else defaults.tol_x)),
        tol_f=float(tolerances.get("tol_f", settings.tol_f if settings else defaults.tol_f)),
        max_iter=int(tolerances.get("max_iter", settings.max_iter if settings else defaults.max_iter)),
        mode=bem.get("mode", defaults.mode),
        upsample=bool(bem.get("upsample", defaults.upsample)),
    )
    epsilon = raw.get("epsilon")
    return RunConfig(
        shape_kind=str(shape["kind"]).strip().lower(),
        shape_params=dict(shape.get("params", {})),
        n=int(shape.get("n", DEFAULT_N)),
        physics=_physics(raw["physics"]),
        epsilon=None if epsilon is None else float(epsilon),
        sweep=_sweep(raw.get("sweep")),
        method=str(raw.get("method", "all")),
        options=options,
        raw=dict(raw),
        issues=issues,
    )


def load_run_config(
    path: Path,
    settings: Optional[Settings] = None,
    overrides: Optional[Mapping] = None,
) -> RunConfig:
    """Lee, aplica las opciones de la línea de comandos y valida."""
    raw = read_config_json(path)
    if overrides and isinstance(raw, dict):
        raw.update(overrides)
    return build_run_config(raw, settings)
