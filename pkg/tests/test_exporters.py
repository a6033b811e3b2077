import numpy as np
import pandas as pd
from openpyxl import load_workbook

from bubres.processing.sweeps import SweepRecord
from bubres.reporting.exporters import (
    dump_matrix,
    read_records_csv,
    write_plot_script,
    write_records_csv,
    write_workbook,
)


def _records():
    return [
        SweepRecord("eps", 0.01, omega_M=0.0431234567890123 - 0.00834j, omega_formula=0.0433 - 0.00831j,
                    omega_multipole=0.04329 - 0.008309j, relative_error=3.3e-4),
        SweepRecord("eps", 0.02, status="failed: ConvergenceError"),
    ]


def test_csv_header_and_line_endings(tmp_path):
    path = write_records_csv(tmp_path / "out" / "sweep.csv", _records(), "abc123", "multipole")
    raw = path.read_bytes()
    assert raw.startswith(b"# config_sha256=abc123 reference=multipole\n")
    assert b"\r\n" not in raw
    header = raw.decode("utf-8").splitlines()[1]
    assert header.startswith("variable,value,omega_M_re,omega_M_im")


def test_csv_round_trip_is_exact(tmp_path):
    records = _records()
    frame = read_records_csv(write_records_csv(tmp_path / "sweep.csv", records, "h", "multipole"))
    assert frame.loc[0, "omega_M_re"] == records[0].omega_M.real
    assert frame.loc[0, "omega_M_im"] == records[0].omega_M.imag
    assert frame.loc[0, "relative_error"] == 3.3e-4
    assert np.isnan(frame.loc[0, "omega_bem_re"])
    assert frame.loc[1, "status"] == "failed: ConvergenceError"


def test_csv_is_deterministic(tmp_path):
    a = write_records_csv(tmp_path / "a.csv", _records(), "h", "bem")
    b = write_records_csv(tmp_path / "b.csv", _records(), "h", "bem")
    assert a.read_bytes() == b.read_bytes()


def test_plot_scripts(tmp_path):
    csv_path = write_records_csv(tmp_path / "sweep_eps.csv", _records(), "h", "multipole")
    eps_script = write_plot_script(csv_path, "eps", "multipole").read_text(encoding="utf-8")
    assert "plot 'sweep_eps.csv'" in eps_script
    assert "'multipole'" in eps_script
    assert "logscale" not in eps_script

    delta_script = write_plot_script(tmp_path / "sweep_delta.csv", "delta", "bem").read_text(encoding="utf-8")
    assert "set logscale xy" in delta_script
    assert "sweep_delta.png" in delta_script


def test_workbook_sheets(tmp_path):
    path = write_workbook(tmp_path / "sweep.xlsx", _records(), {"epsilon": 0.05, "method": "all"})
    book = load_workbook(path)
    assert book.sheetnames == ["records", "config"]
    config = pd.read_excel(path, sheet_name="config")
    assert list(config["key"]) == ["epsilon", "method"]


def test_dump_matrix(tmp_path):
    matrix = np.array([[1 + 2j, 3.5], [0.0, -1j]])
    re_path, im_path = dump_matrix(tmp_path / "coated", matrix)
    assert re_path.name == "coated_matrix_re.csv"
    assert np.array_equal(pd.read_csv(re_path, header=None).to_numpy(), matrix.real)
    assert np.array_equal(pd.read_csv(im_path, header=None).to_numpy(), matrix.imag)
