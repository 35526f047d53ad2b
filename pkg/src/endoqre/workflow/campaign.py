"""Run the nested geometry/target campaign and assemble a JSON report."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone
from functools import lru_cache
from importlib import resources as _res
from pathlib import Path

import jsonschema
import numpy as np

from endoqre.errors import AdapterError, EndoqreError, ValidationError
from endoqre.io_formats import PESSamples
from endoqre.qpe import DEFAULT_DELTA_E, qpe_plan
from endoqre.surface_code import load_hardware_profile, physical_resources
from endoqre.units import HARTREE_EV
from endoqre.vtst import (Transmission, barrier_from_pes, corrected_pes, eckart_kappa,
                          fit_eckart, frequencies_from_hessian, log_ho_partition, vtst_rate)
from endoqre.workflow.adapters import ChemistryAdapters, MockAdapters
from endoqre.workflow.qbg import HL_POINTS_PER_PATHWAY, aggregate, build_qbg

__all__ = ["CampaignConfig", "run_campaign", "validate_report", "write_report",
           "report_schema", "pathway_resources"]

PATHWAYS = ("double-factorized", "dual-plane-wave")
PARTITION_MODELS = ("harmonic", "unity")
SCHEMA_FILE = "data/campaign_report.schema.json"
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CampaignConfig:
    n_geometries: int = 1
    n_targets: int = 1
    temperatures: tuple = (300.0,)
    pathway: str = "double-factorized"
    delta_e: float = DEFAULT_DELTA_E  # Hartree
    overlap: float = 1.0
    failure: float = 0.01
    hardware: str = "calibrated"
    n_orbitals: int = 16
    fcidump: str | None = None
    cutoff_ry: float = 40.0
    vacuum_padding: float = 10.0
    partition_model: str = "harmonic"
    tunneling: bool = True
    sil1_variant: str = "printed"
    samples_per_geometry: int = 1
    max_workers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "temperatures", tuple(float(t) for t in self.temperatures))
        self.validate()

    def validate(self) -> None:
        if int(self.n_geometries) != self.n_geometries or self.n_geometries < 1:
            raise ValidationError("n_geometries must be an integer >= 1")
        if int(self.n_targets) != self.n_targets or self.n_targets < 1:
            raise ValidationError("n_targets must be an integer >= 1")
        if not self.temperatures or any(not (math.isfinite(t) and t > 0)
                                        for t in self.temperatures):
            raise ValidationError("temperatures must be a non-empty list of positive values")
        if self.pathway not in PATHWAYS:
            raise ValidationError(f"pathway must be one of {PATHWAYS}")
        if not (math.isfinite(self.delta_e) and self.delta_e > 0):
            raise ValidationError("delta_e must be positive")
        if not 0 < self.overlap <= 1:
            raise ValidationError("overlap must lie in (0, 1]")
        if not 0 < self.failure < 1:
            raise ValidationError("failure probability must lie in (0, 1)")
        if self.partition_model not in PARTITION_MODELS:
            raise ValidationError(f"partition_model must be one of {PARTITION_MODELS}")
        if self.n_orbitals < 1 or self.samples_per_geometry < 1:
            raise ValidationError("n_orbitals and samples_per_geometry must be >= 1")
        if self.max_workers is not None and self.max_workers < 1:
            raise ValidationError("max_workers must be >= 1")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["temperatures"] = list(self.temperatures)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown campaign fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValidationError(str(exc)) from None

    def digest(self) -> str:
        """sha256 of the canonical JSON form, excluding scheduling-only fields."""
        data = self.to_dict()
        data.pop("max_workers")
        text = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


# --------------------------------------------------------------------------
# Resources


@lru_cache(maxsize=1)
def _dpw_constant() -> float:
    """c_DPW fitted on the reference O3@C60 point."""
    from endoqre.dpw_encoding import (build_dpw_hamiltonian, calibrate_dpw_constant,
                                      grid_points_for_cell, grid_spacing_from_cutoff, o3_at_c60)
    from endoqre.reference_data import DPW_CUTOFF_RY, DPW_VACUUM_PADDING_ANGSTROM

    geo = o3_at_c60(DPW_VACUUM_PADDING_ANGSTROM)
    m = grid_points_for_cell(geo.cell[0], grid_spacing_from_cutoff(DPW_CUTOFF_RY))
    return calibrate_dpw_constant(build_dpw_hamiltonian(geo, m), delta_e=DEFAULT_DELTA_E)


def pathway_resources(config: CampaignConfig):
    """(logical, physical, plan) for one QPE energy evaluation."""
    hw = load_hardware_profile(config.hardware)
    if config.pathway == "double-factorized":
        from endoqre.calibration import calibrated_df_model, calibrated_workload
        from endoqre.df_encoding import (build_eri_matrix, df_lambda, df_logical_cost,
                                         double_factorize)

        model = calibrated_df_model()
        if config.fcidump:
            from endoqre.io_formats import read_fcidump

            ints = read_fcidump(config.fcidump)
            fact = double_factorize(build_eri_matrix(ints))
            lam = df_lambda(ints, fact)[2]
            logical = df_logical_cost(ints.n_orbitals, fact, lam, config.delta_e, model)
        else:
            wl = calibrated_workload()
            n = config.n_orbitals
            logical = df_logical_cost(n, wl.rank(n), wl.lam(n), config.delta_e, model)
    else:
        from endoqre.dpw_encoding import (build_dpw_hamiltonian, dpw_logical_cost,
                                          grid_points_for_cell, grid_spacing_from_cutoff,
                                          o3_at_c60)

        geo = o3_at_c60(config.vacuum_padding)
        m = grid_points_for_cell(geo.cell[0], grid_spacing_from_cutoff(config.cutoff_ry))
        ham = build_dpw_hamiltonian(geo, m)
        c = _dpw_constant()
        logical = dpw_logical_cost(ham, config.delta_e, c)
    plan = qpe_plan(logical.lambda_total, config.delta_e, config.overlap, config.failure)
    return logical, physical_resources(logical, hw), plan


# --------------------------------------------------------------------------
# Kinetics per (geometry, target)


def _partition_profile(freqs: dict, T: float):
    """(Q_R, Q_GT(s)) from frequencies at s = -1, 0, +1.

    At the minima the lowest real mode becomes the reaction coordinate and
    is dropped; ln Q_GT is interpolated linearly in s between anchors.
    """
    q_r_log = log_ho_partition(freqs[-1.0].real, T)
    anchors = []
    for s in (-1.0, 0.0, 1.0):
        modes = list(freqs[s].real)
        if s != 0.0 and modes:
            modes = modes[1:]
        anchors.append(log_ho_partition(modes, T))
    xs = np.array([-1.0, 0.0, 1.0])
    ys = np.array(anchors)
    return math.exp(q_r_log), lambda s: math.exp(float(np.interp(s, xs, ys)))


def _run_pair(config: CampaignConfig, adapters: ChemistryAdapters, i: int, j: int) -> dict:
    s, v_ll = adapters.low_level_path(i, j)
    s_half = adapters.half_point(i, j)
    s_hl = [-1.0, s_half, 0.0, 1.0]
    v_hl = adapters.high_level_energies(i, j, s_hl)
    samples = PESSamples(s, v_ll, s_hl, v_hl)
    fit = fit_eckart(samples, config.sil1_variant)
    v_f, v_r, s_peak = barrier_from_pes(samples, fit)
    reactant = samples.v_high_at(-1.0)
    pes = [(x, v - reactant) for x, v in corrected_pes(samples, fit)]
    freqs = {x: frequencies_from_hessian(adapters.hessian(i, j, x)) for x in (-1.0, 0.0, 1.0)}
    imag = freqs[0.0].imaginary[0] if freqs[0.0].imaginary else None

    rates = []
    for T in config.temperatures:
        if config.tunneling and imag is not None:
            kappa = eckart_kappa(v_f, v_r, imag, T)
        else:
            kappa = Transmission(1.0, barrierless=v_f <= 0)
        if config.partition_model == "harmonic":
            q_r, q_gt = _partition_profile(freqs, T)
            result = vtst_rate(pes, T, q_gt=q_gt, q_r=q_r, kappa=kappa)
        else:
            result = vtst_rate(pes, T, kappa=kappa)
        rates.append(result)
    return {
        "i": i,
        "j": j,
        "status": "ok",
        "fit": fit.to_dict(),
        "barrier": {"forward_eV": v_f * HARTREE_EV, "reverse_eV": v_r * HARTREE_EV,
                    "s_peak": s_peak},
        "imaginary_frequency_cm": imag,
        "rates": [{"T": r.temperature, "kappa": float(r.kappa), "s_star": r.s_star,
                   "k": r.k_total, "barrierless": r.barrierless} for r in rates],
    }


def run_campaign(config: CampaignConfig, adapters: ChemistryAdapters | None = None) -> dict:
    """Run every (geometry, target) pair and return the report document.

    Adapter or fit failures are recorded per pair; the rest of the campaign
    still runs.
    """
    adapters = adapters if adapters is not None else MockAdapters()
    logical, physical, plan = pathway_resources(config)

    pairs = [(i, j) for i in range(1, config.n_geometries + 1)
             for j in range(1, config.n_targets + 1)]
    failures = []
    geometry_failed = set()
    for i in range(1, config.n_geometries + 1):
        try:
            adapters.generate_geometry(i)
        except EndoqreError as exc:
            geometry_failed.add(i)
            failures.append({"i": i, "j": None, "stage": "geometry",
                             "type": type(exc).__name__, "error": str(exc)})

    def task(pair):
        i, j = pair
        try:
            return _run_pair(config, adapters, i, j)
        except AdapterError as exc:
            return {"i": i, "j": j, "stage": "adapter", "type": type(exc).__name__,
                    "error": str(exc)}
        except EndoqreError as exc:
            return {"i": i, "j": j, "stage": "kinetics", "type": type(exc).__name__,
                    "error": str(exc)}

    todo = [p for p in pairs if p[0] not in geometry_failed]
    if adapters.serial or len(todo) <= 1:
        outcomes = [task(p) for p in todo]
    else:
        with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
            outcomes = list(pool.map(task, todo))
    pathways = [o for o in outcomes if o.get("status") == "ok"]
    failures += [o for o in outcomes if o.get("status") != "ok"]
    failures.sort(key=lambda f: (f["i"], -1 if f["j"] is None else f["j"]))

    graph = build_qbg(config.n_geometries, config.n_targets, logical, physical, plan.shots,
                      encoding=config.pathway)
    totals = aggregate(graph)
    qpe_calls = []
    for i, j in pairs:
        for label in ("-1", "s_half", "0", "+1"):
            qpe_calls.append({"i": i, "j": j, "s": label, "t_count": logical.t_count * plan.shots,
                              "runtime_seconds": physical.runtime * plan.shots})

    report = {
        "schema_version": SCHEMA_VERSION,
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": config.to_dict(),
        "config_hash": config.digest(),
        "adapters": adapters.name,
        "status": "partial" if failures else "complete",
        "pathways": pathways,
        "failures": failures,
        "resources": {
            "encoding": config.pathway,
            "qpe": plan.to_dict(),
            "logical": _jsonable(logical.to_dict()),
            "physical": physical.to_dict(),
            "energy_runtime_seconds": physical.runtime * plan.shots,
        },
        "qpe_invocations": len(pairs) * HL_POINTS_PER_PATHWAY,
        "qpe_calls": qpe_calls,
        "qbg": {"totals": totals.to_dict(), "n_nodes": len(graph)},
        "sampling_multiplier": config.samples_per_geometry,
    }
    validate_report(report)
    return report


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


@lru_cache(maxsize=1)
def report_schema() -> dict:
    return json.loads(_res.files("endoqre").joinpath(SCHEMA_FILE).read_text())


def validate_report(report: dict) -> None:
    try:
        jsonschema.validate(report, report_schema())
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"report does not match schema: {exc.message}") from None


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(report: dict, out_dir) -> dict:
    """Write the report JSON and a rate CSV under a config-derived name."""
    validate_report(report)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"campaign-{report['config_hash'][:16]}"
    json_path = out / f"{stem}.json"
    json_path.write_text(report_json(report))

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "T", "kappa", "s_star", "k"])
    for p in report["pathways"]:
        for r in p["rates"]:
            w.writerow([p["i"], p["j"], repr(r["T"]), repr(r["kappa"]), repr(r["s_star"]),
                        repr(r["k"])])
    csv_path = out / f"{stem}-rates.csv"
    csv_path.write_text(buf.getvalue())
    return {"report": str(json_path), "rates": str(csv_path)}
