import json

import pytest

from bubres.numerics.geometry import circle, discretize, ellipse
from bubres.processing.resonance import PhysicalConfig


@pytest.fixture
def half_circle():
    return discretize(circle(0.5), 128)


@pytest.fixture
def small_ellipse():
    return discretize(ellipse(0.6, 0.4), 128)


@pytest.fixture
def fig1_physics():
    """Burbuja R=0.5 con velocidades unitarias, δ=1e-3 y δ_lw=0.5."""
    return PhysicalConfig.from_contrasts(v_b=1.0, v_l=1.0, v_w=1.0, delta=1e-3, delta_lw=0.5)


@pytest.fixture
def fig2_physics():
    return PhysicalConfig.from_contrasts(v_b=1.0, v_l=1.0, v_w=1.0, delta=1e-3, delta_lw=1.5)


@pytest.fixture
def run_config_dict():
    return {
        "shape": {"kind": "circle", "params": {"r": 0.5}, "n": 32},
        "physics": {"v_b": 1.0, "v_l": 1.0, "v_w": 1.0, "delta": 1e-3, "delta_lw": 0.5},
        "epsilon": 0.05,
        "method": "formula",
    }


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name="run.json"):
        path = tmp_path / name
        if isinstance(data, str):
            path.write_text(data, encoding="utf-8")
        else:
            path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write
