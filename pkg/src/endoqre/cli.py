"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 campaign finished with failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from endoqre import __version__
from endoqre.errors import EndoqreError

EXIT_OK, EXIT_INVALID, EXIT_PARTIAL = 0, 2, 3


def _temps(text: str) -> list[float]:
    try:
        values = [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse temperature list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("temperature list is empty")
    return values


def _emit(text: str, out_dir: str | None, name: str) -> None:
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / name).write_text(text)
        print(str(path / name))
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _mha(value: float) -> float:
    return value * 1e-3


def cmd_encode_df(args) -> int:
    from endoqre.calibration import calibrated_df_model
    from endoqre.df_encoding import (build_eri_matrix, df_lambda, df_logical_cost,
                                     double_factorize, factorization_summary)
    from endoqre.io_formats import read_fcidump

    ints = read_fcidump(args.input)
    ints.validate()
    fact = double_factorize(build_eri_matrix(ints), args.threshold)
    lam = df_lambda(ints, fact)[2]
    logical = df_logical_cost(ints.n_orbitals, fact, lam, _mha(args.delta_e),
                              calibrated_df_model())
    record = factorization_summary(ints, fact, logical)
    record["precision_qubits"] = logical.precision_qubits
    record["discarded_weight"] = fact.discarded_weight
    _emit(_dump(record), args.out, "encode-df.json")
    return EXIT_OK


def cmd_encode_dpw(args) -> int:
    from endoqre.dpw_encoding import (build_dpw_hamiltonian, calibrate_dpw_constant,
                                      dpw_logical_cost, grid_points_for_cell,
                                      grid_spacing_from_cutoff, o3_at_c60, tables_to_csv)
    from endoqre.io_formats import read_xyz
    from endoqre.workflow.campaign import _dpw_constant

    geo = read_xyz(args.input, cell=args.cell, vacuum_padding=args.padding) if args.input \
        else o3_at_c60(args.padding)
    a0 = grid_spacing_from_cutoff(args.cutoff)
    m = args.points or grid_points_for_cell(geo.cell[0], a0)
    ham = build_dpw_hamiltonian(geo, m, args.kinetic_convention)
    c = calibrate_dpw_constant(ham) if args.calibrate else (args.c_dpw or _dpw_constant())
    logical = dpw_logical_cost(ham, _mha(args.delta_e), c)
    record = ham.summary()
    record.update({"cutoff_ry": args.cutoff, "target_spacing_angstrom": a0,
                   "logical_qubits": logical.logical_qubits, "t_count": logical.t_count,
                   "precision_qubits": logical.precision_qubits, "c_dpw": c})
    _emit(_dump(record), args.out, "encode-dpw.json")
    if args.csv:
        if not args.out:
            raise EndoqreError("--csv needs --out")
        _emit(tables_to_csv(ham), args.out, "dpw-tables.csv")
    return EXIT_OK


def cmd_qpe_plan(args) -> int:
    from endoqre.qpe import qpe_plan

    plan = qpe_plan(args.lam, _mha(args.delta_e), args.overlap, args.failure)
    _emit(_dump({"qpe": plan.to_dict()}), args.out, "qpe-plan.json")
    return EXIT_OK


def cmd_physical(args) -> int:
    from endoqre.calibration import table1_regression
    from endoqre.resources import LogicalResources
    from endoqre.surface_code import load_hardware_profile, physical_resources

    if args.sweep:
        rows = table1_regression(_mha(args.delta_e))
        cols = ["n_orbitals", "logical_qubits", "t_count", "code_distance", "physical_qubits",
                "t_factories", "factory_qubits", "runtime"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols + [f"published_{c}" for c in cols[1:]])
        pub_keys = ["logical_qubits", "t_count", "distance", "physical_qubits", "t_factories",
                    "factory_qubits", "runtime"]
        for r in rows:
            w.writerow([r[c] for c in cols] + [r["published"][k] for k in pub_keys])
        _emit(buf.getvalue(), args.out, "resource-sweep.csv")
        return EXIT_OK
    if args.logical_qubits is None or args.t_count is None:
        raise EndoqreError("physical needs --logical-qubits and --t-count, or --sweep")
    hw = load_hardware_profile(args.hardware)
    phys = physical_resources(LogicalResources(args.logical_qubits, args.t_count), hw)
    _emit(_dump({"physical": phys.to_dict(), "hardware": hw.to_dict()}), args.out,
          "physical.json")
    return EXIT_OK


def cmd_eckart_fit(args) -> int:
    from endoqre.io_formats import read_pes_table
    from endoqre.vtst import fit_eckart

    fit = fit_eckart(read_pes_table(args.input, args.units), args.sil1)
    _emit(fit.to_json() + "\n", args.out, "eckart-fit.json")
    return EXIT_OK


def cmd_rate(args) -> int:
    from endoqre.io_formats import read_pes_table
    from endoqre.vtst import (barrier_from_pes, corrected_pes, eckart_kappa, fit_eckart,
                              rates_to_csv, vtst_rate)

    samples = read_pes_table(args.input, args.units)
    fit = fit_eckart(samples, args.sil1)
    v_f, v_r, _ = barrier_from_pes(samples, fit)
    ref = samples.v_high_at(-1.0)
    pes = [(s, v - ref) for s, v in corrected_pes(samples, fit)]
    results = []
    for T in args.temps:
        kappa = eckart_kappa(v_f, v_r, args.imag_freq, T) if args.imag_freq else 1.0
        results.append(vtst_rate(pes, T, kappa=kappa))
    _emit(rates_to_csv(results), args.out, "rates.csv")
    return EXIT_OK


def _campaign_config(args):
    from endoqre.workflow.campaign import CampaignConfig

    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise EndoqreError(f"cannot read campaign config: {exc}") from None
        if not isinstance(data, dict):
            raise EndoqreError("campaign config must be a JSON object")
    overrides = {
        "n_geometries": args.n_geos, "n_targets": args.targets, "temperatures": args.temps,
        "pathway": args.pathway, "overlap": args.overlap, "hardware": args.hardware,
        "n_orbitals": args.n_orbitals, "fcidump": args.input, "cutoff_ry": args.cutoff,
        "partition_model": args.partition_model,
    }
    if args.delta_e is not None:
        overrides["delta_e"] = _mha(args.delta_e)
    if args.no_tunneling:
        overrides["tunneling"] = False
    data.update({k: v for k, v in overrides.items() if v is not None})
    return CampaignConfig.from_dict(data)


def cmd_campaign(args) -> int:
    from endoqre.workflow.adapters import MockAdapters
    from endoqre.workflow.campaign import report_json, run_campaign, write_report

    config = _campaign_config(args)
    fail_on = [int(j) for j in args.fail_on.split(",")] if args.fail_on else ()
    report = run_campaign(config, MockAdapters(fail_on=fail_on))
    if args.out:
        paths = write_report(report, args.out)
        print(_dump(paths), end="")
    else:
        sys.stdout.write(report_json(report))
    for f in report["failures"]:
        print(f"failure i={f['i']} j={f['j']}: {f['error']}", file=sys.stderr)
    return EXIT_PARTIAL if report["failures"] else EXIT_OK


def cmd_qbg_export(args) -> int:
    from endoqre.workflow.campaign import pathway_resources
    from endoqre.workflow.qbg import aggregate, build_qbg

    config = _campaign_config(args)
    logical, physical, plan = pathway_resources(config)
    graph = build_qbg(config.n_geometries, config.n_targets, logical, physical, plan.shots,
                      encoding=config.pathway)
    if args.format in ("dot", "both"):
        _emit(graph.to_dot(), args.out, "qbg.dot")
    if args.format in ("json", "both"):
        data = json.loads(graph.to_json())
        data["totals"] = aggregate(graph).to_dict()
        _emit(_dump(data), args.out, "qbg.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="endoqre", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, delta=True):
        sp.add_argument("--out", help="output directory (default: stdout)")
        if delta:
            sp.add_argument("--delta-e", type=float, default=1.0, help="target accuracy, mHa")

    sp = sub.add_parser("encode-df", help="double-factorize an FCIDUMP and cost the walk")
    sp.add_argument("--input", required=True, help="FCIDUMP file")
    sp.add_argument("--threshold", type=float, default=1e-8,
                    help="relative eigenvalue cutoff")
    common(sp)
    sp.set_defaults(func=cmd_encode_df)

    sp = sub.add_parser("encode-dpw", help="dual plane-wave tables and cost for an XYZ geometry")
    sp.add_argument("--input", help="XYZ file (default: shipped O3@C60 model)")
    sp.add_argument("--cell", help="cubic cell edges a,b,c in Angstrom")
    sp.add_argument("--padding", type=float, default=10.0, help="vacuum padding, Angstrom")
    sp.add_argument("--cutoff", type=float, default=40.0, help="plane-wave cutoff, Ry")
    sp.add_argument("--points", type=int, help="grid points per dimension (default from cutoff)")
    sp.add_argument("--kinetic-convention", choices=("printed", "halved"), default="printed")
    sp.add_argument("--c-dpw", type=float, help="cost constant (default: reference calibration)")
    sp.add_argument("--calibrate", action="store_true",
                    help="fit c_DPW so this input costs the reference T-count")
    sp.add_argument("--csv", action="store_true", help="also write dx,dy,dz,T,V tables")
    common(sp)
    sp.set_defaults(func=cmd_encode_dpw)

    sp = sub.add_parser("qpe-plan", help="precision qubits, walk queries and shots")
    sp.add_argument("--lambda", dest="lam", type=float, required=True, help="lambda, Hartree")
    sp.add_argument("--overlap", type=float, default=1.0)
    sp.add_argument("--failure", type=float, default=0.01)
    common(sp)
    sp.set_defaults(func=cmd_qpe_plan)

    sp = sub.add_parser("physical", help="surface-code overhead for a logical workload")
    sp.add_argument("--logical-qubits", type=int)
    sp.add_argument("--t-count", type=float)
    sp.add_argument("--hardware", help="profile name or JSON file (default: calibrated)")
    sp.add_argument("--sweep", action="store_true",
                    help="resource-vs-orbital CSV over the reference active spaces")
    common(sp)
    sp.set_defaults(func=cmd_physical)

    for name, func, helptext in (("eckart-fit", cmd_eckart_fit, "fit the Eckart correction"),
                                 ("rate", cmd_rate, "VTST rate constants from a PES table")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--input", required=True, help="PES CSV (s,V_LL then #HL block)")
        sp.add_argument("--units", help="energy unit of the table (default: file or Ha)")
        sp.add_argument("--sil1", choices=("printed", "unhalved"), default="printed")
        if name == "rate":
            sp.add_argument("--temps", type=_temps, default=[300.0], help="K, comma separated")
            sp.add_argument("--imag-freq", type=float,
                            help="barrier imaginary frequency, cm^-1 (enables tunneling)")
        sp.add_argument("--out", help="output directory (default: stdout)")
        sp.set_defaults(func=func)

    for name, func, helptext in (("campaign", cmd_campaign, "run the mock-adapter campaign"),
                                 ("qbg-export", cmd_qbg_export, "write the QBG as DOT/JSON")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", help="campaign config JSON")
        sp.add_argument("--n-geos", type=int)
        sp.add_argument("--targets", type=int)
        sp.add_argument("--temps", type=_temps)
        sp.add_argument("--pathway", choices=("double-factorized", "dual-plane-wave"))
        sp.add_argument("--input", help="FCIDUMP for the double-factorized pathway")
        sp.add_argument("--n-orbitals", type=int)
        sp.add_argument("--cutoff", type=float, help="plane-wave cutoff, Ry")
        sp.add_argument("--overlap", type=float)
        sp.add_argument("--hardware")
        sp.add_argument("--partition-model", choices=("harmonic", "unity"))
        sp.add_argument("--no-tunneling", action="store_true")
        sp.add_argument("--delta-e", type=float, help="target accuracy, mHa")
        sp.add_argument("--out", help="output directory (default: stdout)")
        if name == "campaign":
            sp.add_argument("--fail-on", help="mock: comma-separated target indices that fail")
        else:
            sp.add_argument("--format", choices=("dot", "json", "both"), default="both")
        sp.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EndoqreError, ValueError, OSError) as exc:
        print(f"endoqre {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
