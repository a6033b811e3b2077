from __future__ import annotations

from typing import Dict, List, Mapping
import math

SHAPE_PARAMS = {
    "circle": ("r",),
    "ellipse": ("a", "b"),
    "star": ("r0", "amplitude", "lobes"),
    "fourier": ("coefficients",),
}
TRIPLET_KEYS = ("rho_b", "rho_l", "rho_w", "kappa_b", "kappa_l", "kappa_w")
SHORTCUT_KEYS = ("v_b", "v_w", "delta")
SHORTCUT_OPTIONAL = ("v_l", "delta_lw", "rho_w")
METHODS = ("formula", "multipole", "bem", "all")
BEM_MODES = ("det", "inv_sigma_min")
SWEEP_VARIABLES = ("eps", "delta")
MAX_DELTA = 0.1


def _issue(level: str, code: str, message: str, **details) -> Dict:
    return {"level": level, "code": code, "message": message, "details": details}


def _is_number(value: object) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _validate_shape(shape: object, issues: List[Dict]) -> None:
    if not isinstance(shape, Mapping):
        issues.append(_issue("ERROR", "SHAPE_MISSING", "Falta el bloque 'shape' {kind, params, n}"))
        return
    kind = str(shape.get("kind", "")).strip().lower()
    if kind not in SHAPE_PARAMS:
        issues.append(
            _issue("ERROR", "SHAPE_UNKNOWN_KIND", f"shape.kind desconocido: '{kind}'", allowed=sorted(SHAPE_PARAMS))
        )
        return
    params = shape.get("params", {})
    if not isinstance(params, Mapping):
        issues.append(_issue("ERROR", "SHAPE_BAD_PARAMS", "shape.params debe ser un objeto"))
        return
    missing = [p for p in SHAPE_PARAMS[kind] if p not in params]
    if missing:
        issues.append(
            _issue("ERROR", "SHAPE_MISSING_PARAMS", f"shape '{kind}': faltan parámetros {missing}", missing=missing)
        )
    if kind == "fourier" and "coefficients" in params:
        coeffs = params["coefficients"]
        well_formed = isinstance(coeffs, list) and coeffs and all(
            isinstance(item, list) and len(item) == 2 and isinstance(item[1], list) and len(item[1]) == 2
            for item in coeffs
        )
        if not well_formed:
            issues.append(
                _issue("ERROR", "SHAPE_BAD_COEFFICIENTS",
                       "shape.params.coefficients debe ser una lista de [m, [re, im]]")
            )
    n = shape.get("n", 128)
    if not isinstance(n, int) or isinstance(n, bool) or n < 16 or n % 2:
        issues.append(_issue("ERROR", "SHAPE_BAD_N", f"shape.n debe ser un entero par >= 16 (valor: {n})", n=n))


def _validate_physics(physics: object, issues: List[Dict]) -> None:
    if not isinstance(physics, Mapping):
        issues.append(_issue("ERROR", "PHYSICS_MISSING", "Falta el bloque 'physics'"))
        return
    has_triplets = any(k in physics for k in TRIPLET_KEYS if k != "rho_w")
    has_shortcut = any(k in physics for k in SHORTCUT_KEYS + ("v_l", "delta_lw"))
    if has_triplets and has_shortcut:
        issues.append(
            _issue("ERROR", "PHYSICS_AMBIGUOUS",
                   "physics mezcla la forma ρ/κ con la forma abreviada {v_b, v_l, v_w, delta, delta_lw}")
        )
        return

    if has_triplets:
        required = TRIPLET_KEYS
    else:
        required = SHORTCUT_KEYS
    missing = [k for k in required if k not in physics]
    if missing:
        issues.append(_issue("ERROR", "PHYSICS_MISSING_KEYS", f"physics: faltan {missing}", missing=missing))

    keys = required if has_triplets else required + SHORTCUT_OPTIONAL
    bad = [k for k in keys if k in physics and (not _is_number(physics[k]) or physics[k] <= 0)]
    if bad:
        issues.append(
            _issue("ERROR", "PHYSICS_NONPOSITIVE", f"physics: valores no numéricos o <= 0 en {bad}", keys=bad)
        )
        return
    if missing:
        return

    if has_triplets:
        delta = physics["rho_b"] / physics["rho_w"]
    else:
        delta = physics["delta"]
        if "delta_lw" not in physics:
            issues.append(
                _issue("WARNING", "PHYSICS_DEFAULT_DELTA_LW", "physics.delta_lw no indicado: se usa 1 (capa = agua)")
            )
        if "v_l" not in physics:
            issues.append(_issue("WARNING", "PHYSICS_DEFAULT_V_L", "physics.v_l no indicado: se usa v_w"))
    if delta > MAX_DELTA:
        issues.append(
            _issue("ERROR", "PHYSICS_NOT_QUASI_STATIC",
                   f"δ = {delta:g} > {MAX_DELTA}: fuera del régimen cuasiestático", delta=delta)
        )


def _validate_sweep(sweep: object, raw: Mapping, issues: List[Dict]) -> None:
    if not isinstance(sweep, Mapping):
        issues.append(_issue("ERROR", "SWEEP_BAD_BLOCK", "sweep debe ser un objeto"))
        return
    variable = sweep.get("variable")
    if variable not in SWEEP_VARIABLES:
        issues.append(
            _issue("ERROR", "SWEEP_BAD_VARIABLE", f"sweep.variable debe ser eps o delta (valor: {variable})")
        )
    if variable == "delta" and raw.get("epsilon") is None:
        issues.append(_issue("ERROR", "SWEEP_DELTA_NEEDS_EPSILON", "un barrido en δ requiere 'epsilon' fijo"))

    if "values" in sweep:
        values = sweep["values"]
        if not isinstance(values, list) or not values:
            issues.append(_issue("ERROR", "SWEEP_EMPTY", "sweep.values está vacío"))
            return
    else:
        missing = [k for k in ("start", "stop", "num") if k not in sweep]
        if missing:
            issues.append(
                _issue("ERROR", "SWEEP_EMPTY", f"sweep requiere 'values' o start/stop/num (faltan {missing})")
            )
            return
        num = sweep["num"]
        if not isinstance(num, int) or isinstance(num, bool) or num < 1:
            issues.append(_issue("ERROR", "SWEEP_EMPTY", f"sweep.num debe ser un entero >= 1 (valor: {num})"))
            return
        spacing = sweep.get("spacing", "linear")
        if spacing not in ("linear", "log"):
            issues.append(_issue("ERROR", "SWEEP_BAD_SPACING", f"sweep.spacing debe ser linear o log ({spacing})"))
        values = [sweep["start"], sweep["stop"]]

    if not all(_is_number(v) for v in values):
        issues.append(_issue("ERROR", "SWEEP_NOT_FINITE", "sweep: todos los valores deben ser números finitos"))
        return
    if any(v <= 0 for v in values):
        issues.append(_issue("ERROR", "SWEEP_NOT_POSITIVE", "sweep: todos los valores deben ser > 0"))
    if variable == "delta" and any(v > MAX_DELTA for v in values):
        issues.append(
            _issue("ERROR", "SWEEP_NOT_QUASI_STATIC",
                   f"sweep: δ > {MAX_DELTA} fuera del régimen cuasiestático", max=max(values))
        )
    if any(b <= a for a, b in zip(values, values[1:])):
        issues.append(_issue("ERROR", "SWEEP_NOT_SORTED", "sweep: los valores deben ser estrictamente crecientes"))


def validate_run_config(raw: object) -> List[Dict]:
    """Valida el JSON de una corrida.

    Devuelve lista de issues con:
      - level: ERROR | WARNING
      - code
      - message
      - details (dict)
    """
    issues: List[Dict] = []
    if not isinstance(raw, Mapping):
        issues.append(_issue("ERROR", "CONFIG_NOT_OBJECT", "La configuración debe ser un objeto JSON"))
        return issues

    _validate_shape(raw.get("shape"), issues)
    _validate_physics(raw.get("physics"), issues)

    eps = raw.get("epsilon")
    if eps is not None and (not _is_number(eps) or eps < 0):
        issues.append(_issue("ERROR", "EPSILON_NEGATIVE", f"epsilon debe ser un número >= 0 (valor: {eps})"))

    if "sweep" in raw:
        _validate_sweep(raw["sweep"], raw, issues)

    method = raw.get("method", "all")
    if method not in METHODS:
        issues.append(_issue("ERROR", "METHOD_UNKNOWN", f"method desconocido: {method}", allowed=list(METHODS)))
    shape = raw.get("shape")
    kind = str(shape.get("kind", "")).strip().lower() if isinstance(shape, Mapping) else ""
    if method == "multipole" and kind and kind != "circle":
        issues.append(
            _issue("ERROR", "METHOD_MULTIPOLE_NEEDS_CIRCLE", f"el método multipolar solo aplica a círculos ({kind})")
        )

    tolerances = raw.get("tolerances", {})
    if not isinstance(tolerances, Mapping):
        issues.append(_issue("ERROR", "TOLERANCES_BAD_BLOCK", "tolerances debe ser un objeto"))
    else:
        bad = [k for k in ("tol_x", "tol_f") if k in tolerances and (not _is_number(tolerances[k]) or tolerances[k] <= 0)]
        max_iter = tolerances.get("max_iter", 1)
        if not isinstance(max_iter, int) or isinstance(max_iter, bool) or max_iter < 1:
            bad.append("max_iter")
        if bad:
            issues.append(_issue("ERROR", "TOLERANCES_INVALID", f"tolerances inválidas: {bad}", keys=bad))

    bem = raw.get("bem", {})
    if not isinstance(bem, Mapping):
        issues.append(_issue("ERROR", "BEM_BAD_BLOCK", "bem debe ser un objeto"))
    else:
        mode = bem.get("mode", "inv_sigma_min")
        if mode not in BEM_MODES:
            issues.append(_issue("ERROR", "BEM_UNKNOWN_MODE", f"bem.mode desconocido: {mode}", allowed=list(BEM_MODES)))
        if "upsample" in bem and not isinstance(bem["upsample"], bool):
            issues.append(_issue("ERROR", "BEM_BAD_UPSAMPLE", "bem.upsample debe ser true o false"))

    return issues
