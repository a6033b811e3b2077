from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping, Tuple

import numpy as np
import pandas as pd

from ..processing.sweeps import SweepRecord

FLOAT_FORMAT = "%.17g"


def ensure_output_dir(path: Path) -> None:
    path.mkdir(parents=True, exist_ok=True)


def records_to_frame(records: Iterable[SweepRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in records])


def write_records_csv(
    path: Path,
    records: Iterable[SweepRecord],
    config_sha256: str,
    reference: str,
) -> Path:
    """CSV UTF-8 con fin de línea LF; primera línea `# config_sha256=... reference=...`."""
    path = Path(path)
    ensure_output_dir(path.parent)
    frame = records_to_frame(records)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"# config_sha256={config_sha256} reference={reference}\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_records_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#", float_precision="round_trip")


def write_plot_script(csv_path: Path, variable: str, reference: str) -> Path:
    """Script de gnuplot junto al CSV.

    Barrido en ε: Re ω frente a ε (fórmula y referencia).
    Barrido en δ: error relativo frente a δ en escala log-log.
    """
    csv_path = Path(csv_path)
    script_path = csv_path.with_suffix(".gp")
    columns = list(records_to_frame([SweepRecord(variable, 0.0)]).columns)
    col = {name: idx + 1 for idx, name in enumerate(columns)}
    png = csv_path.with_suffix(".png").name
    lines = [
        f"# generado por bubres a partir de {csv_path.name}",
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        "set terminal pngcairo size 900,600",
        f"set output '{png}'",
        "set grid",
    ]
    if variable == "eps":
        lines += [
            "set xlabel 'epsilon'",
            "set ylabel 'Re(omega)'",
            f"plot '{csv_path.name}' using {col['value']}:{col['omega_formula_re']} with linespoints title 'formula'",
        ]
        if reference in ("multipole", "bem"):
            ref_col = col[f"omega_{reference}_re"]
            lines[-1] += f", \\\n     '' using {col['value']}:{ref_col} with linespoints title '{reference}'"
    else:
        lines += [
            "set logscale xy",
            "set format x '10^{%L}'",
            "set xlabel 'delta'",
            "set ylabel 'relative error'",
            f"plot '{csv_path.name}' using {col['value']}:{col['relative_error']} with linespoints title 'formula vs {reference}'",
        ]
    with open(script_path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(lines) + "\n")
    return script_path


def write_workbook(path: Path, records: Iterable[SweepRecord], raw_config: Mapping) -> Path:
    """Libro Excel con hojas `records` y `config`."""
    path = Path(path)
    ensure_output_dir(path.parent)
    records_df = records_to_frame(records)
    config_df = pd.DataFrame(
        [{"key": k, "value": json.dumps(v, ensure_ascii=False)} for k, v in sorted(raw_config.items())]
    )
    with pd.ExcelWriter(path, engine="openpyxl") as writer:
        records_df.to_excel(writer, sheet_name="records", index=False)
        config_df.to_excel(writer, sheet_name="config", index=False)
    return path


def dump_matrix(stem: Path, matrix: np.ndarray) -> Tuple[Path, Path]:
    """Escribe `<stem>_matrix_re.csv` y `<stem>_matrix_im.csv`."""
    stem = Path(stem)
    ensure_output_dir(stem.parent)
    re_path = stem.parent / f"{stem.name}_matrix_re.csv"
    im_path = stem.parent / f"{stem.name}_matrix_im.csv"
    for target, part in ((re_path, matrix.real), (im_path, matrix.imag)):
        pd.DataFrame(part).to_csv(target, index=False, header=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return re_path, im_path
