import numpy as np
import pytest

from bubres.numerics import layerpot
from bubres.numerics.geometry import circle, discretize, ellipse
from bubres.processing.resonance import SolverOptions
from bubres.processing.sweeps import SweepPlan, SweepRecord, evaluate_point, physics_at, run_sweep


def _plan(physics, variable="eps", values=(0.01, 0.02, 0.04), method="formula", shape=None, **kwargs):
    boundary = discretize(shape or circle(0.5), 32)
    return SweepPlan(
        variable=variable,
        values=values,
        boundary=boundary,
        quantities=layerpot.spectral_quantities(boundary),
        physics=physics,
        method=method,
        **kwargs,
    )


def test_plan_reference_selection(fig1_physics):
    assert _plan(fig1_physics).reference == "multipole"
    assert _plan(fig1_physics, method="bem").reference == "bem"
    ellipse_plan = _plan(fig1_physics, shape=ellipse(0.6, 0.4))
    assert not ellipse_plan.run_multipole
    assert ellipse_plan.reference == "none"
    assert _plan(fig1_physics, shape=ellipse(0.6, 0.4), method="all").reference == "bem"


def test_eps_sweep_against_multipole(fig1_physics):
    records = run_sweep(_plan(fig1_physics))
    assert [r.value for r in records] == [0.01, 0.02, 0.04]
    assert not any(r.failed for r in records)
    assert all(np.isfinite(r.relative_error) and r.relative_error < 2e-3 for r in records)
    assert all(np.isnan(r.omega_bem) for r in records)
    multipole = [r.omega_multipole.real for r in records]
    assert multipole == sorted(multipole)
    # ω_M no depende de ε
    assert len({r.omega_M for r in records}) == 1


def test_delta_sweep_error_trend(fig1_physics):
    records = run_sweep(_plan(fig1_physics, variable="delta", values=(1e-4, 1e-3, 1e-2), epsilon=0.05))
    errors = [r.relative_error for r in records]
    assert errors[0] < errors[1] < errors[2]


def test_physics_at_delta_keeps_speeds(fig1_physics):
    plan = _plan(fig1_physics, variable="delta", values=(1e-4,), epsilon=0.05)
    cfg = physics_at(plan, 1e-4)
    assert cfg.delta == pytest.approx(1e-4)
    assert cfg.v_b == pytest.approx(fig1_physics.v_b)
    assert cfg.delta_lw == fig1_physics.delta_lw
    assert physics_at(_plan(fig1_physics), 0.02) is fig1_physics


def test_first_failure_stops_serial_sweep(fig1_physics):
    plan = _plan(fig1_physics, options=SolverOptions(max_iter=1))
    records = run_sweep(plan)
    assert len(records) == 1
    assert records[0].failed
    assert records[0].status.startswith("failed:")


@pytest.mark.slow
def test_parallel_sweep_keeps_order(fig1_physics):
    plan = _plan(fig1_physics, values=(0.01, 0.02, 0.04))
    serial = run_sweep(plan)
    parallel = run_sweep(plan, workers=2)
    assert [r.value for r in parallel] == [0.01, 0.02, 0.04]
    for a, b in zip(serial, parallel):
        assert abs(a.omega_multipole - b.omega_multipole) <= 1e-9 * abs(a.omega_multipole)


def test_bem_point(fig1_physics):
    plan = _plan(fig1_physics, method="all")
    record = evaluate_point(plan, 0.1)
    assert abs(record.omega_bem - record.omega_multipole) <= 1e-6 * abs(record.omega_multipole)


def test_record_row_splits_complex():
    row = SweepRecord("eps", 0.01, omega_M=0.04 - 0.008j, omega_formula=0.041 - 0.008j).to_row()
    assert row["omega_M_re"] == 0.04
    assert row["omega_M_im"] == -0.008
    assert np.isnan(row["omega_bem_re"])
    assert row["status"] == "ok"


def test_unknown_variable(fig1_physics):
    with pytest.raises(ValueError):
        run_sweep(_plan(fig1_physics, variable="radius"))


def test_config_error_mid_sweep_leaves_marker_row(fig1_physics):
    plan = _plan(fig1_physics, variable="delta", values=(1e-4, 1e-3, 0.5), epsilon=0.05)
    records = run_sweep(plan)
    assert len(records) == 3
    assert not records[0].failed and not records[1].failed
    assert records[2].failed
    assert "cuasiestático" in records[2].status
