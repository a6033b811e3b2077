import functools
import logging
import sys
from pathlib import Path
from typing import List, Optional

import click
import pandas as pd

from .config import get_settings
from .errors import BubresError, ConfigError, NumericalError
from .io.run_config import RunConfig, load_run_config
from .numerics.geometry import discretize
from .numerics.layerpot import spectral_quantities
from .numerics.rootfind import seeds_around
from .processing.resonance import (
    ResonanceResult,
    assemble_system,
    bem_resonance,
    coated_shift,
    minnaert_uncoated,
    multipole_resonance,
)
from .processing.sweeps import METHOD_CHOICES, SweepPlan, physics_at, run_sweep
from .reporting.exporters import dump_matrix, ensure_output_dir, write_plot_script, write_records_csv, write_workbook

logger = logging.getLogger(__name__)


def _fmt(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.12g}{z.imag:+.12g}i"


def _configure_logging(level: str, verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _handle_errors(func):
    """Traduce BubresError a códigos de salida (2 config, 3 numérico)."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except BubresError as exc:
            click.echo(f"❌ {type(exc).__name__}: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


def _common_options(func):
    func = click.option("--verbose", "-v", is_flag=True, help="Logging DEBUG (trazas de Muller).")(func)
    func = click.option("--xlsx", is_flag=True, help="Escribe también un libro Excel.")(func)
    func = click.option("--dump-matrices", is_flag=True, help="Vuelca la matriz BEM en la raíz.")(func)
    func = click.option("--method", type=click.Choice(METHOD_CHOICES), default=None,
                        help="Pisa el método del JSON.")(func)
    func = click.option("--out", "out", type=click.Path(path_type=Path), default=None,
                        help="Archivo CSV de salida.")(func)
    func = click.option("--config", "config_path", type=click.Path(path_type=Path), required=True,
                        help="JSON de la corrida.")(func)
    return func


def _echo_issues(issues: List[dict]) -> None:
    if issues:
        click.echo("⚠️ Se encontraron los siguientes problemas:")
        for issue in issues:
            click.echo(f"- [{issue['level']}] {issue['code']}: {issue['message']}")


def _load(config_path: Path, method: Optional[str], verbose: bool):
    settings = get_settings()
    _configure_logging(settings.log_level, verbose)
    overrides = {"method": method} if method is not None else None
    try:
        run = load_run_config(config_path, settings, overrides)
    except ConfigError as exc:
        if not exc.issues:
            raise
        _echo_issues(exc.issues)
        sys.exit(ConfigError.exit_code)
    _echo_issues(run.issues)
    return settings, run


def _report_rows(results: List[ResonanceResult]) -> pd.DataFrame:
    return pd.DataFrame([
        {
            "method": r.method,
            "omega_re": r.omega.real,
            "omega_im": r.omega.imag,
            "residual": r.residual,
            "iterations": r.iterations,
        }
        for r in results
    ])


def _write_report(out: Optional[Path], results: List[ResonanceResult], run: RunConfig, xlsx: bool) -> None:
    if out is None:
        return
    ensure_output_dir(out.parent)
    frame = _report_rows(results)
    with open(out, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"# config_sha256={run.config_hash}\n")
        frame.to_csv(handle, index=False, float_format="%.17g", lineterminator="\n")
    if xlsx:
        with pd.ExcelWriter(out.with_suffix(".xlsx"), engine="openpyxl") as writer:
            frame.to_excel(writer, sheet_name="records", index=False)
    click.echo(f"📂 Resultados en: {out}")


def _solve_references(run: RunConfig, boundary, eps: float, seeds_from: complex) -> List[ResonanceResult]:
    """Multipolo (si es círculo) y BEM según el método pedido."""
    results = []
    is_circle = run.shape_kind == "circle"
    if is_circle and run.method in ("formula", "multipole", "all"):
        results.append(
            multipole_resonance(float(run.shape_params["r"]), eps, run.physics, seeds_around(seeds_from), run.options)
        )
    if run.method in ("bem", "all"):
        results.append(bem_resonance(boundary, run.physics, eps, seeds_around(seeds_from), run.options))
    return results


def _dump(out_dir: Path, stem: str, run: RunConfig, boundary, eps: float, results: List[ResonanceResult]) -> None:
    bem = [r for r in results if r.method.startswith("bem")]
    omega = bem[0].omega if bem else results[-1].omega
    paths = dump_matrix(out_dir / stem, assemble_system(omega, boundary, run.physics, eps, run.options.upsample))
    click.echo(f"📂 Matrices en: {paths[0]}, {paths[1]}")


@click.group()
def cli():
    """bubres: resonancias de burbujas 2D con y sin recubrimiento."""
    pass


@cli.command()
@_common_options
@_handle_errors
def minnaert(config_path, out, method, dump_matrices, xlsx, verbose):
    """Resonancia de Minnaert de la burbuja sin recubrimiento."""
    settings, run = _load(config_path, method, verbose)
    if run.epsilon:
        raise ConfigError("'minnaert' no admite epsilon > 0; use el comando 'coated'")

    boundary = discretize(run.curve(), run.n)
    q = spectral_quantities(boundary)
    formula = minnaert_uncoated(q, run.physics, run.options)
    click.echo(f"ω_M (fórmula) = {_fmt(formula.omega)}  [residuo {formula.residual:.2e}]")

    results = [formula] + _solve_references(run, boundary, 0.0, formula.omega)
    for ref in results[1:]:
        gap = abs(formula.omega - ref.omega) / abs(ref.omega)
        click.echo(f"ω ({ref.method}) = {_fmt(ref.omega)}  [residuo {ref.residual:.2e}, "
                   f"{ref.iterations} it]  diferencia relativa fórmula = {gap:.3e}")

    if dump_matrices:
        _dump(out.parent if out else settings.output_dir, "minnaert", run, boundary, 0.0, results)
    _write_report(out, results, run, xlsx)


@cli.command()
@_common_options
@_handle_errors
def coated(config_path, out, method, dump_matrices, xlsx, verbose):
    """Resonancia de la burbuja recubierta: fórmula de corrimiento y referencias."""
    settings, run = _load(config_path, method, verbose)
    if run.epsilon is None:
        raise ConfigError("'coated' requiere 'epsilon' en la configuración")
    eps = run.epsilon

    boundary = discretize(run.curve(), run.n)
    q = spectral_quantities(boundary)
    omega_M = minnaert_uncoated(q, run.physics, run.options)
    formula = coated_shift(omega_M.omega, q, run.physics, eps)
    shift = formula.omega - omega_M.omega
    click.echo(f"ω_M          = {_fmt(omega_M.omega)}")
    click.echo(f"ω_ε (fórmula) = {_fmt(formula.omega)}")
    click.echo(f"corrimiento   = {_fmt(shift)}")

    results = [omega_M, formula]
    if eps > 0:
        results += _solve_references(run, boundary, eps, formula.omega)
    for ref in results[2:]:
        err = abs(formula.omega - ref.omega) / abs(ref.omega)
        click.echo(f"ω̂_ε ({ref.method}) = {_fmt(ref.omega)}  [residuo {ref.residual:.2e}]  "
                   f"error relativo = {err:.3e}")

    if dump_matrices and eps > 0:
        _dump(out.parent if out else settings.output_dir, "coated", run, boundary, eps, results)
    _write_report(out, results, run, xlsx)


@cli.command()
@_common_options
@click.option("--variable", type=click.Choice(["eps", "delta"]), default=None, help="Pisa sweep.variable.")
@click.option("--workers", type=int, default=None, help="Procesos en paralelo (1 = arranque en caliente).")
@_handle_errors
def sweep(config_path, out, method, dump_matrices, xlsx, verbose, variable, workers):
    """Barrido en ε o δ: CSV + script de gnuplot."""
    settings, run = _load(config_path, method, verbose)
    if run.sweep is None:
        raise ConfigError("'sweep' requiere el bloque 'sweep' en la configuración")
    variable = variable or run.sweep.variable
    if variable == "delta" and run.epsilon is None:
        raise ConfigError("un barrido en δ requiere 'epsilon'")

    boundary = discretize(run.curve(), run.n)
    plan = SweepPlan(
        variable=variable,
        values=run.sweep.values,
        boundary=boundary,
        quantities=spectral_quantities(boundary),
        physics=run.physics,
        epsilon=run.epsilon or 0.0,
        method=run.method,
        options=run.options,
    )
    records = run_sweep(plan, workers or settings.workers)

    out = out or settings.output_dir / f"sweep_{variable}.csv"
    csv_path = write_records_csv(out, records, run.config_hash, plan.reference)
    script = write_plot_script(csv_path, variable, plan.reference)
    click.echo(f"📂 CSV: {csv_path}")
    click.echo(f"📈 Script de gnuplot: {script}")
    if xlsx:
        click.echo(f"📂 Excel: {write_workbook(csv_path.with_suffix('.xlsx'), records, run.raw)}")
    if dump_matrices:
        ok = [r for r in records if not r.failed]
        if ok and plan.run_bem:
            last = ok[-1]
            eps = last.value if variable == "eps" else plan.epsilon
            matrix = assemble_system(last.omega_bem, boundary, physics_at(plan, last.value), eps, run.options.upsample)
            dump_matrix(csv_path.parent / csv_path.stem, matrix)

    failed = [r for r in records if r.failed]
    if failed:
        click.echo(f"❌ {len(failed)} punto(s) sin convergencia; ver columna status.", err=True)
        sys.exit(NumericalError.exit_code)
    click.echo("✅ Barrido completo.")


if __name__ == "__main__":
    cli()
