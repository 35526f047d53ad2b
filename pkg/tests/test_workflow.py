import json

import jsonschema
import pytest

from endoqre.errors import AdapterError, ValidationError
from endoqre.reference_data import C60_RADIUS, CARBON_VDW_RADIUS
from endoqre.units import HARTREE_EV
from endoqre.resources import LogicalResources, PhysicalResources
from endoqre.workflow.adapters import MockAdapters, build_ozone_fixture, load_ozone_fixture
from endoqre.workflow.campaign import (
    CampaignConfig,
    report_json,
    report_schema,
    run_campaign,
    validate_report,
    write_report,
)
from endoqre.workflow.qbg import (
    GeometryError,
    QBGGraph,
    QBGNode,
    aggregate,
    build_qbg,
    free_radius,
)

LOGICAL = LogicalResources(100, 1e9, t_per_query=1e5, lambda_total=2.0)
PHYSICAL = PhysicalResources(13, 400_000, 14, 7000, 5000.0)


def test_qbg_has_expected_nodes_and_edges():
    g = build_qbg(2, 3, LOGICAL, PHYSICAL)
    ids = {n.id for n in g.nodes}
    assert ids == {"evaluate_stability", "vtst", "qpe", "block_encoding", "initial_state",
                   "ci_neb", "tzvp_pbe", "xtb_langevin"}
    resolved = g.validate()
    assert resolved.has_edge("qpe", "block_encoding")
    assert "ground state energies" in resolved.edges["vtst", "qpe"]["labels"]


def test_qpe_invocations_scale_with_loops():
    g = build_qbg(2, 3, LOGICAL, PHYSICAL)
    assert g.node("qpe").invocations == 24


def test_removing_provider_breaks_resolution():
    g = build_qbg(1, 1, LOGICAL, PHYSICAL)
    g.remove_node("tzvp_pbe")
    with pytest.raises(ValidationError, match="energies and atomic forces"):
        g.validate()


def test_cycle_detected():
    g = QBGGraph([
        QBGNode("a", "classical", "algorithm", provides=("x",), requires=("y",)),
        QBGNode("b", "classical", "algorithm", provides=("y",), requires=("x",)),
    ])
    with pytest.raises(ValidationError, match="cycle"):
        g.validate()


def test_duplicate_node_rejected():
    node = QBGNode("a", "classical", "workflow")
    with pytest.raises(ValidationError, match="duplicate"):
        QBGGraph([node, node])


@pytest.mark.parametrize("kw", [{"kind": "analog"}, {"abstraction_level": "gate"},
                                {"invocations": -1}, {"shots": 0}, {"id": ""}])
def test_node_validation(kw):
    base = dict(id="n", kind="classical", abstraction_level="workflow")
    base.update(kw)
    with pytest.raises(ValidationError):
        QBGNode(**base)


def test_aggregate_totals():
    g = build_qbg(2, 3, LOGICAL, PHYSICAL, shots=2)
    tot = aggregate(g)
    assert tot.t_count == pytest.approx(24 * 2 * 1e9)
    assert tot.quantum_runtime == pytest.approx(24 * 2 * 5000.0)
    assert tot.logical_qubits_max == 100
    assert tot.physical_qubits_max == 400_000
    assert tot.classical_invocations["tzvp_pbe"] == 3 * 2 + 3 * 6


def test_aggregate_empty_graph():
    tot = aggregate(QBGGraph())
    assert tot.t_count == 0 and tot.logical_qubits_max == 0


def test_exports():
    g = build_qbg(1, 1, LOGICAL, PHYSICAL)
    data = json.loads(g.to_json())
    assert len(data["nodes"]) == 8
    dot = g.to_dot()
    assert dot.startswith("digraph QBG {") and "cluster_algorithm" in dot
    assert '"qpe" -> "block_encoding"' in dot


def test_free_radius():
    assert free_radius(C60_RADIUS, CARBON_VDW_RADIUS).free_radius == pytest.approx(2.70)
    with pytest.raises(GeometryError):
        free_radius(0.5, 1.7)


# --------------------------------------------------------------------------


def test_fixture_file_matches_generator():
    assert load_ozone_fixture() == json.loads(json.dumps(build_ozone_fixture()))


def test_mock_failure_injection():
    ad = MockAdapters(fail_on=[(1, 2)])
    with pytest.raises(AdapterError):
        ad.low_level_path(1, 2)
    ad.low_level_path(1, 1)
    assert ad.calls["low_level_path"] == 2


def test_config_validation():
    with pytest.raises(ValidationError):
        CampaignConfig(n_geometries=0)
    with pytest.raises(ValidationError):
        CampaignConfig(pathway="tensor-hypercontraction")
    with pytest.raises(ValidationError, match="unknown"):
        CampaignConfig.from_dict({"n_geos": 2})


def test_config_digest_ignores_scheduling():
    a = CampaignConfig(max_workers=1).digest()
    b = CampaignConfig(max_workers=8).digest()
    assert a == b != CampaignConfig(n_targets=2).digest()


@pytest.fixture(scope="module")
def small_report():
    return run_campaign(CampaignConfig(n_geometries=2, n_targets=3))


def test_campaign_qpe_count(small_report):
    assert small_report["qpe_invocations"] == 24
    assert len(small_report["qpe_calls"]) == 24
    assert small_report["status"] == "complete"


def test_campaign_barrier_from_cyclic_side(small_report):
    for p in small_report["pathways"]:
        assert p["barrier"]["forward_eV"] == pytest.approx(1.11, abs=1e-9)
        assert p["barrier"]["reverse_eV"] == pytest.approx(2.41, abs=1e-9)


def test_campaign_report_schema(small_report):
    validate_report(small_report)
    jsonschema.validate(small_report, report_schema())
    bad = dict(small_report, extra=1)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, report_schema())


def test_partial_failure():
    cfg = CampaignConfig(n_geometries=1, n_targets=3)
    rep = run_campaign(cfg, MockAdapters(fail_on=[2]))
    assert rep["status"] == "partial"
    ok = [p for p in rep["pathways"] if p["status"] == "ok"]
    assert len(ok) == 2
    assert len(rep["failures"]) == 1 and rep["failures"][0]["j"] == 2
    assert rep["failures"][0]["stage"] == "adapter"


def test_campaign_is_deterministic():
    cfg = CampaignConfig(n_geometries=2, n_targets=2, temperatures=(300, 500))
    a = run_campaign(cfg)
    b = run_campaign(CampaignConfig(**{**cfg.to_dict(), "max_workers": 1}))
    a.pop("generated_at"), b.pop("generated_at")
    a["config"].pop("max_workers"), b["config"].pop("max_workers")
    assert report_json(a) == report_json(b)


def test_serial_adapters_match_threaded():
    cfg = CampaignConfig(n_geometries=2, n_targets=2)
    a = run_campaign(cfg, MockAdapters(serial=True))
    b = run_campaign(cfg, MockAdapters())
    assert a["pathways"] == b["pathways"]


def test_units_are_consistent(small_report):
    # fit parameters stay in Hartree; the barrier is reported in eV
    p = small_report["pathways"][0]
    dv0_ev = 1.11 - 0.99
    assert p["fit"]["B"] * HARTREE_EV == pytest.approx(4 * dv0_ev, rel=1e-12)
    assert p["barrier"]["forward_eV"] == pytest.approx(1.11, rel=1e-12)


def test_dpw_pathway_resources():
    rep = run_campaign(CampaignConfig(pathway="dual-plane-wave"))
    assert rep["resources"]["encoding"] == "dual-plane-wave"
    assert rep["resources"]["logical"]["t_count"] == pytest.approx(1e16, rel=1e-9)


def test_fcidump_pathway(data_dir):
    rep = run_campaign(CampaignConfig(fcidump=str(data_dir / "lih_sto3g.fcidump")))
    assert rep["resources"]["logical"]["details"]["n_orbitals"] == 6


def test_write_report(tmp_path, small_report):
    paths = write_report(small_report, tmp_path)
    files = sorted(p.name for p in tmp_path.iterdir())
    assert len(files) == 2 and all(f.startswith("campaign-") for f in files)
    assert json.loads(open(paths["report"]).read())["qpe_invocations"] == 24
