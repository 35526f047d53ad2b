import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from endoqre.calibration import (
    calibrated_hardware,
    fit_df_model,
    fit_surface_code,
    table1_regression,
)
from endoqre.errors import ConfigurationError, DomainError
from endoqre.qpe import qpe_plan
from endoqre.reference_data import TABLE1
from endoqre.resources import LogicalResources
from endoqre.surface_code import (
    HardwareModel,
    code_distance,
    factory_count,
    load_hardware_profile,
    physical_resources,
    runtime_report,
)


def test_default_profile_constants():
    hw = HardwareModel()
    assert hw.cycle_time == pytest.approx(400e-9)
    assert hw.qubits_per_logical(13) == 392


def test_above_threshold_refused():
    with pytest.raises(DomainError, match="below threshold"):
        HardwareModel(physical_error_rate=0.02)


def test_budget_near_one_gives_minimum_distance():
    hw = HardwareModel(error_budget=1 - 1e-12)
    logical = LogicalResources(logical_qubits=10, t_count=1e3)
    assert code_distance(logical, hw) == 3


def test_zero_t_count_gives_zero_factories():
    hw = HardwareModel()
    logical = LogicalResources(logical_qubits=10, t_count=0.0)
    phys = physical_resources(logical, hw)
    assert phys.t_factories == 0 and phys.factory_qubits == 0
    assert factory_count(logical, hw) == 0


@given(st.integers(1, 5000), st.floats(1e3, 1e16))
def test_distance_is_minimal_and_odd(q, t):
    hw = HardwareModel()
    logical = LogicalResources(logical_qubits=q, t_count=t)
    d = code_distance(logical, hw)
    assert d % 2 == 1
    fail = lambda dd: q * t * dd * hw.logical_error_rate(dd)  # noqa: E731
    assert fail(d) <= hw.error_budget
    if d > hw.min_distance:
        assert fail(d - 2) > hw.error_budget


def test_distance_grows_with_t_count():
    hw = HardwareModel()
    ds = [code_distance(LogicalResources(100, 10.0**k), hw) for k in range(3, 17)]
    assert ds == sorted(ds)


def test_profile_json_round_trip(tmp_path):
    hw = HardwareModel(physical_error_rate=1e-3, name="custom")
    path = tmp_path / "hw.json"
    hw.to_json(path)
    assert load_hardware_profile(str(path)) == hw
    assert load_hardware_profile(json.loads(path.read_text())) == hw


def test_unknown_profile_fields_rejected():
    with pytest.raises(ConfigurationError, match="unknown"):
        HardwareModel.from_dict({"gate_tim": 1})


def test_missing_profile():
    with pytest.raises(ConfigurationError):
        load_hardware_profile("/nonexistent/profile.json")


def test_calibrated_profile_is_default():
    assert load_hardware_profile() == calibrated_hardware()
    assert load_hardware_profile("calibrated") == calibrated_hardware()


def test_runtime_scales_with_shots_and_points():
    logical = LogicalResources(100, 1e8)
    phys = physical_resources(logical, HardwareModel())
    plan = qpe_plan(1.0, overlap=math.sqrt(0.5))
    assert runtime_report(plan, phys, 4) == pytest.approx(phys.runtime * 7 * 4)


# --------------------------------------------------------------------------


def test_df_fit_constants_positive():
    model, workload = fit_df_model()
    assert model.c0 > 0 and 0 <= model.ancilla_overhead
    assert workload.lambda_knee > 0


def test_surface_fit_matches_calibration_distances():
    hw = fit_surface_code()
    for n in (16, 96):
        row = next(r for r in TABLE1 if r.n_orbitals == n)
        logical = LogicalResources(row.logical_qubits, row.t_count)
        assert code_distance(logical, hw) == row.distance


def test_regression_rows_are_labelled():
    rows = table1_regression()
    assert [r["n_orbitals"] for r in rows] == [r.n_orbitals for r in TABLE1]
    assert sum(r["calibration_row"] for r in rows) == 2
