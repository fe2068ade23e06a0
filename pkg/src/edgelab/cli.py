"""Command-line front end.

Subcommands: edge-mc, trace-mc, deviation, verify, tw-table,
enumerate-paths, enumerate-diagrams.  Experiment parameters come from a
JSON config file (--config) with flag overrides for seed, replicas, workers
and output path.  The process exits 0 exactly when every gate of the
requested run passes.  Report-producing commands write the canonical result
JSON, the delimited data, and (unless --no-plot) a rendered PNG figure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import diagrams as diag_mod
from . import edge_laws, paths, report
from .ensembles import EnsembleSpec
from .harness import ExperimentConfig, run_experiment, write_result


def _load_config(args, kind: str) -> ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            d = json.load(fh)
        d["kind"] = kind
        config = ExperimentConfig.from_dict(d)
    else:
        raise SystemExit(f"{kind} requires --config pointing to a JSON file")
    if args.seed is not None and config.ensemble is not None:
        config.ensemble = EnsembleSpec(
            config.ensemble.beta, config.ensemble.shape,
            config.ensemble.entry_law, args.seed, config.ensemble.stream_id)
    if args.replicas is not None:
        config.replicas = args.replicas
    if args.workers is not None:
        config.workers = args.workers
    if args.out is not None:
        config.out = args.out
    return config


def _emit(result, config, plot_fn=None, no_plot=False) -> int:
    if config.out:
        write_result(result, config.out)
        if plot_fn is not None and not no_plot:
            png = config.out[:-5] if config.out.endswith(".json") else config.out
            plot_fn(result, png + ".png")
        print(f"wrote {config.out} (gates {'passed' if result.gates_passed else 'FAILED'})")
    else:
        print(result.to_json(), end="")
    return 0 if result.gates_passed else 1


def _add_common(p):
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--no-plot", action="store_true")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="edgelab",
        description="random-matrix edge statistics: exact checks and Monte Carlo")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("edge-mc", "trace-mc", "deviation"):
        _add_common(sub.add_parser(name))

    pv = sub.add_parser("verify", help="run the exact verification suites")
    pv.add_argument("suite", choices=["identities", "paths", "diagrams", "all"])
    pv.add_argument("--out", default=None)

    pt = sub.add_parser("tw-table", help="emit the edge-law CDF table")
    pt.add_argument("--out", required=True, help="CSV path")
    pt.add_argument("--json-meta", default=None)
    pt.add_argument("--x-min", type=float, default=-10.0)
    pt.add_argument("--x-max", type=float, default=8.0)
    pt.add_argument("--spacing", type=float, default=0.01)
    pt.add_argument("--no-plot", action="store_true")

    pp = sub.add_parser("enumerate-paths", help="exact path counts")
    pp.add_argument("--beta", type=int, required=True, choices=[1, 2])
    pp.add_argument("--dimension", type=int, required=True)
    pp.add_argument("--lengths", type=int, nargs="+", required=True)
    pp.add_argument("--strength", choices=["weak", "strong", "matched"],
                    default="weak")
    pp.add_argument("--bipartite", action="store_true",
                    help="interpret --dimension as N and --rows as M")
    pp.add_argument("--rows", type=int, default=None)

    pd = sub.add_parser("enumerate-diagrams", help="diagram census table")
    pd.add_argument("--s-max", type=int, default=3)
    pd.add_argument("--beta", type=int, nargs="+", default=[1, 2])
    pd.add_argument("--out", default=None)

    args = parser.parse_args(argv)

    if args.command in ("edge-mc", "trace-mc", "deviation"):
        kind = {"edge-mc": "edge_mc", "trace-mc": "trace_mc",
                "deviation": "deviation_sweep"}[args.command]
        config = _load_config(args, kind)
        result = run_experiment(config)
        plot_fn = {"edge_mc": report.plot_edge_mc,
                   "deviation_sweep": report.plot_deviation}.get(kind)
        return _emit(result, config, plot_fn, args.no_plot)

    if args.command == "verify":
        suites = {"identities": ["verify_identities"],
                  "paths": ["verify_paths"],
                  "diagrams": ["verify_diagrams"],
                  "all": ["verify_identities", "verify_paths", "verify_diagrams"]}
        overall = True
        reports = []
        for kind in suites[args.suite]:
            result = run_experiment(ExperimentConfig(kind=kind))
            reports.append(result)
            for check in result.details["checks"]:
                status = "PASS" if check["pass"] else "FAIL"
                print(f"[{status}] {kind}: {check['name']} (error {check['error']:.3g})")
            overall = overall and result.gates_passed
        if args.out:
            with open(args.out, "w") as fh:
                for r in reports:
                    fh.write(r.to_json())
        print("verification:", "all passed" if overall else "FAILURES present")
        return 0 if overall else 1

    if args.command == "tw-table":
        table = edge_laws.build_edge_law_table(args.x_min, args.x_max, args.spacing)
        meta = args.json_meta or (args.out[:-4] + ".json"
                                  if args.out.endswith(".csv") else args.out + ".json")
        edge_laws.write_edge_law_table(table, args.out, meta)
        if not args.no_plot:
            png = (args.out[:-4] if args.out.endswith(".csv") else args.out) + ".png"
            report.plot_edge_law_table(table, png)
        print(f"wrote {args.out} (monotone: {table.monotone})")
        return 0 if table.monotone else 1

    if args.command == "enumerate-paths":
        if args.bipartite:
            if args.rows is None or len(args.lengths) != 1:
                raise SystemExit("bipartite counts need --rows and one length")
            count = paths.count_sigma_bipartite(
                args.beta, args.rows, args.dimension, args.lengths[0],
                args.strength if args.strength != "matched" else "weak")
        else:
            count = paths.count_sigma(args.beta, args.dimension,
                                      tuple(args.lengths), args.strength)
        print(json.dumps({"beta": args.beta, "dimension": args.dimension,
                          "lengths": args.lengths, "strength": args.strength,
                          "count": count}))
        return 0

    if args.command == "enumerate-diagrams":
        records = diag_mod.export_d_table(tuple(args.beta), args.s_max)
        text = json.dumps(records, indent=2, sort_keys=True) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
            print(f"wrote {args.out}")
        else:
            print(text, end="")
        return 0

    raise AssertionError  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
