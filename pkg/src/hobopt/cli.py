"""Command-line front end for the compile / solve / experiment pipeline.

Every command is deterministic given its flags: randomness flows from a
single --seed (default 0, never time-based), data outputs carry a run_id
derived from the command configuration, and a manifest JSON records the
full configuration next to the outputs.  Timestamps live only in the
manifest, so the data files are byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .poly import ParseError, VarId, parse_expr
from .pythagorean import (build_hobo, build_qubo, discovery_curve,
                          run_experiment, write_curve_csv, write_triples_csv)
from .sampler import AnnealConfig, anneal
from .tensorize import CompiledModel, compile_polynomial

PROG = "hobopt"


def _run_id(command: str, computation: dict) -> str:
    """Hash of what is computed (inputs, parameters, seed), not where it goes.

    Output paths are excluded so the same run written elsewhere produces
    byte-identical data files.
    """
    payload = json.dumps(
        {"command": command, "computation": computation, "version": __version__},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _write_json(path: Path, data: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(manifest_path: Path, command: str, config: dict,
                    run_id: str, outputs: list[Path]) -> None:
    manifest = {
        "run_id": run_id,
        "command": command,
        "config": config,
        "seed": config.get("seed"),
        "version": __version__,
        "timestamps": {"written_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())},
        "outputs": [str(p) for p in outputs],
    }
    _write_json(manifest_path, manifest)


def _load_model(path: str) -> CompiledModel:
    with open(path) as fh:
        return CompiledModel.from_json_dict(json.load(fh))


def _preset_problem(args):
    if args.preset != "pythagorean":
        raise ValueError(f"unknown preset {args.preset!r}")
    if args.power is None:
        raise ValueError("--preset pythagorean requires --power")
    if args.model == "qubo":
        return build_qubo(args.power, args.penalty_weight)
    return build_hobo(args.power)


def cmd_compile(args) -> int:
    if args.preset:
        problem = _preset_problem(args)
        model = problem.compiled
        computation = {"preset": args.preset, "power": args.power,
                       "model": args.model, "penalty_weight": args.penalty_weight}
    else:
        if not args.expr_file or not args.vars:
            print(f"{PROG} compile: need --expr-file and --vars, or --preset",
                  file=sys.stderr)
            return 1
        labels = [v.strip() for v in args.vars.split(",") if v.strip()]
        declared = {label: VarId(i, label) for i, label in enumerate(labels)}
        text = Path(args.expr_file).read_text()
        poly = parse_expr(text, declared)
        model = compile_polynomial(poly, var_labels=labels)
        computation = {"expression": text, "vars": labels}
    config = _config_dict(args)
    run_id = _run_id("compile", computation)
    out = Path(args.out)
    data = model.to_json_dict()
    data["run_id"] = run_id
    _write_json(out, data)
    _write_manifest(out.with_suffix(out.suffix + ".manifest.json"),
                    "compile", config, run_id, [out])
    print(f"offset {model.offset}")
    print(f"degree {model.degree}")
    print(f"nvars {model.nvars}")
    print(f"wrote {out}")
    return 0


def cmd_solve(args) -> int:
    if args.top < 0:
        raise ValueError(f"--top must be >= 0, got {args.top}")
    model = _load_model(args.model_file)
    cfg = AnnealConfig(shots=args.shots, sweeps_per_shot=args.sweeps,
                       t_initial=args.t_initial, t_final=args.t_final,
                       seed=args.seed)
    samples = anneal(model, cfg)
    config = _config_dict(args)
    run_id = _run_id("solve", {
        "model": model.fingerprint(), "shots": args.shots, "sweeps": args.sweeps,
        "t_initial": args.t_initial, "t_final": args.t_final, "seed": args.seed,
    })
    outputs: list[Path] = []
    if args.out:
        out = Path(args.out)
        data = samples.to_json_dict()
        data["run_id"] = run_id
        _write_json(out, data)
        outputs.append(out)
    if args.csv:
        csv_path = Path(args.csv)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        samples.write_csv(csv_path, model.encodings,
                          header_comments=[f"run_id={run_id}"])
        outputs.append(csv_path)
    if outputs:
        manifest = outputs[0].with_suffix(outputs[0].suffix + ".manifest.json")
        _write_manifest(manifest, "solve", config, run_id, outputs)
    for entry in samples.entries[: args.top]:
        print(f"Energy {entry.energy}, Occurrence {entry.occurrence}")
        if model.encodings:
            decoded = ", ".join(
                f"{var.name} = {var.decode(entry.assignment)}"
                for var in model.encodings
            )
            print(f"  {decoded}")
    return 0


def cmd_pythagorean(args) -> int:
    config = _config_dict(args)
    run_id = _run_id("pythagorean", _computation_flags(args, power=args.power))
    _, samples, report = run_experiment(
        args.power, args.model, args.shots,
        seed=args.seed, sweeps_per_shot=args.sweeps,
        t_initial=args.t_initial, t_final=args.t_final,
        penalty_weight=args.penalty_weight,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.csv"
    triples_path = out_dir / "triples.csv"
    samples_path = out_dir / "samples.json"
    write_curve_csv([report], report_path, header_comments=[f"run_id={run_id}"])
    write_triples_csv(report, triples_path, header_comments=[f"run_id={run_id}"])
    samples_data = samples.to_json_dict()
    samples_data["run_id"] = run_id
    _write_json(samples_path, samples_data)
    _write_manifest(out_dir / "manifest.json", "pythagorean", config, run_id,
                    [report_path, triples_path, samples_path])
    found = len(report.found_primitive & report.theoretical)
    print(f"power {report.power} model {report.model_kind} shots {report.shots}")
    print(f"theoretical {len(report.theoretical)} found {found} "
          f"discovery_rate {report.discovery_rate}")
    return 0


def cmd_discovery_curve(args) -> int:
    config = _config_dict(args)
    run_id = _run_id("discovery-curve",
                     _computation_flags(args, max_power=args.max_power))
    if args.max_power < 3:
        print(f"warning: no powers in range [3, {args.max_power}]; "
              "writing an empty curve", file=sys.stderr)
        reports = []
    else:
        reports = discovery_curve(
            args.model, args.max_power, args.shots,
            seed=args.seed, sweeps_per_shot=args.sweeps,
            t_initial=args.t_initial, t_final=args.t_final,
            penalty_weight=args.penalty_weight,
        )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_curve_csv(reports, out, header_comments=[f"run_id={run_id}"])
    _write_manifest(out.with_suffix(out.suffix + ".manifest.json"),
                    "discovery-curve", config, run_id, [out])
    for r in reports:
        print(f"power {r.power} discovery_rate {r.discovery_rate}")
    print(f"wrote {out}")
    return 0


def _config_dict(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _computation_flags(args, **extra) -> dict:
    flags = {
        "model": args.model, "shots": args.shots, "sweeps": args.sweeps,
        "t_initial": args.t_initial, "t_final": args.t_final,
        "penalty_weight": args.penalty_weight, "seed": args.seed,
    }
    flags.update(extra)
    return flags


def _add_anneal_flags(parser: argparse.ArgumentParser, default_shots: int) -> None:
    parser.add_argument("--shots", type=int, default=default_shots)
    parser.add_argument("--sweeps", type=int, default=100,
                        help="sweeps per annealing chain (default 100)")
    parser.add_argument("--t-initial", type=float, default=None,
                        help="start temperature (default: max(1, max |coeff|))")
    parser.add_argument("--t-final", type=float, default=0.1)
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Compile binary-variable polynomials, sample low-energy "
                    "states, and run the Pythagorean triple experiments.",
    )
    parser.add_argument("--version", action="version",
                        version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile an expression (or a preset) "
                                        "to a model JSON")
    p.add_argument("--expr-file", help="file holding one expression")
    p.add_argument("--vars", help="comma-separated variable labels, index order")
    p.add_argument("--preset", choices=["pythagorean"])
    p.add_argument("--power", type=int, default=None)
    p.add_argument("--model", choices=["hobo", "qubo"], default="hobo")
    p.add_argument("--penalty-weight", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("solve", help="anneal a compiled model")
    p.add_argument("model_file")
    _add_anneal_flags(p, default_shots=10000)
    p.add_argument("--top", type=int, default=10,
                   help="rows to print (0 prints nothing)")
    p.add_argument("--out", help="sample set JSON path")
    p.add_argument("--csv", help="sample set CSV path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("pythagorean", help="run one triple-search experiment")
    p.add_argument("--power", type=int, required=True)
    p.add_argument("--model", choices=["hobo", "qubo"], default="hobo")
    _add_anneal_flags(p, default_shots=100000)
    p.add_argument("--penalty-weight", type=float, default=0.01)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_pythagorean)

    p = sub.add_parser("discovery-curve", help="discovery rate per power, "
                                               "as CSV plot data")
    p.add_argument("--max-power", type=int, required=True)
    p.add_argument("--model", choices=["hobo", "qubo"], default="hobo")
    _add_anneal_flags(p, default_shots=100000)
    p.add_argument("--penalty-weight", type=float, default=0.01)
    p.add_argument("--out", required=True, help="curve CSV path")
    p.set_defaults(func=cmd_discovery_curve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValueError, OSError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
