import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from endoqre import units
from endoqre.errors import DomainError
from endoqre.qpe import (
    eigenphase,
    energy_from_phase,
    precision_qubits,
    qpe_plan,
    shot_count,
    shot_count_exact,
    walk_queries,
)


def test_hartree_ev_round_trip():
    assert units.to_hartree(units.HARTREE_EV, "eV") == pytest.approx(1.0, rel=1e-15)
    assert units.from_hartree(1.0, "eV") == pytest.approx(27.211386245988, rel=1e-15)
    assert units.to_hartree(2.0, "Ry") == 1.0
    assert units.to_hartree(1.0, "mHa") == 1e-3


def test_unknown_unit_is_rejected():
    with pytest.raises(ValueError, match="unknown energy unit"):
        units.to_hartree(1.0, "kcal")


def test_kt_over_h_at_300k():
    assert units.KB_J * 300 / units.PLANCK_J == pytest.approx(6.2510e12, rel=1e-4)


def test_bohr_angstrom_inverse():
    assert units.bohr_to_angstrom(units.angstrom_to_bohr(1.7)) == pytest.approx(1.7, rel=1e-15)


# --------------------------------------------------------------------------


def test_precision_qubits_for_one_hartree():
    assert precision_qubits(1.0, 1e-3) == 12
    assert walk_queries(12) == 4095


def test_precision_qubits_doubles_step_exactly():
    base = precision_qubits(3.7, 1e-3)
    for k in range(1, 21):
        assert precision_qubits(3.7 * 2**k, 1e-3) == base + k


def test_precision_qubits_exact_power_of_two_boundary():
    # lam chosen so the log argument is exactly 2^10
    lam = 2**10 * 2 * 1e-3 / (math.sqrt(2) * math.pi)
    assert precision_qubits(lam, 1e-3) == 10


@pytest.mark.parametrize("lam,de", [(0, 1e-3), (-1, 1e-3), (1, 0), (1, -1)])
def test_precision_qubits_rejects_nonpositive(lam, de):
    with pytest.raises(DomainError):
        precision_qubits(lam, de)


def test_shots_for_half_overlap():
    assert shot_count(math.sqrt(0.5), 0.01) == 7
    assert shot_count_exact(math.sqrt(0.5), 0.01) == pytest.approx(math.log(100) / math.log(2))


def test_unit_overlap_needs_one_shot():
    assert shot_count(1.0, 0.01) == 1
    assert shot_count(1.0, 1e-9) == 1


@pytest.mark.parametrize("overlap", [0.0, -0.1, 1.5])
def test_overlap_out_of_range(overlap):
    with pytest.raises(DomainError):
        shot_count(overlap, 0.01)


@pytest.mark.parametrize("failure", [0.0, 1.0, 2.0])
def test_failure_out_of_range(failure):
    with pytest.raises(DomainError):
        shot_count(0.5, failure)


def test_eigenphase_rejects_underestimated_lambda():
    with pytest.raises(DomainError, match="under-normalized"):
        eigenphase(2.0, 1.0)


@given(st.floats(-1.0, 1.0), st.floats(1e-3, 1e6))
def test_phase_energy_round_trip(x, lam):
    e = x * lam
    assert abs(energy_from_phase(eigenphase(e, lam), lam) - e) <= 4e-15 * lam


def test_qpe_plan_dict_uses_lambda_key():
    plan = qpe_plan(1.0, 1e-3, overlap=math.sqrt(0.5))
    d = plan.to_dict()
    assert d["lambda"] == 1.0 and "lam" not in d
    assert (plan.m, plan.walk_queries, plan.shots) == (12, 4095, 7)
