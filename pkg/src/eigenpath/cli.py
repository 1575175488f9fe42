"""Command-line runner for the experiment catalog.

Every run needs ``--seed``. With ``--out PREFIX`` it writes PREFIX.json and
PREFIX.csv; verdict lines always go to stdout and the wall-clock time to
stderr. The exit status is 0 exactly when every verdict passes.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import List, Optional

from .experiments import CATALOG, PATH_KINDS, list_experiments, resolve_params, run_experiment
from .oracles import DEFAULT_COST_CONSTANT, OracleConfig
from .reports import assemble_report, build_report, csv_text, report_text, write_outputs

REGIMES = ("known-overlaps", "parallel", "dominant", "overlap-free")

# flag name -> parameter key
PARAM_FLAGS = {
    "p": "p", "p0": "p0", "r": "r", "gamma": "gamma", "delta": "delta", "p-m": "p_m", "p-s": "p_s",
    "theta": "theta", "theta-lo": "theta_lo", "theta-hi": "theta_hi", "length": "length", "items": "items",
    "dim": "dim", "segments": "segments", "min-overlap": "min_overlap", "steps": "steps",
}
INT_KEYS = {"r", "items", "dim", "segments", "steps"}


def parse_value(text: str):
    low = text.strip().lower()
    if low in ("none", "null"):
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, required=True, help="master seed (required)")
    p.add_argument("--trials", type=int, help="number of trials (catalog default otherwise)")
    p.add_argument("--out", help="output prefix for PREFIX.json and PREFIX.csv")
    p.add_argument("--mode", choices=("ideal", "noisy"), default="ideal")
    p.add_argument("--epsilon", type=float, default=1e-3, help="oracle error amplitude")
    p.add_argument("--cost-constant", type=float, default=DEFAULT_COST_CONSTANT,
                   help="c in the oracle cost ceil(c ln(1/eps) / delta)")
    p.add_argument("--no-jitter", action="store_true", help="phase estimates land exactly on eigenphases")
    p.add_argument("--json", action="store_true", help="also print the JSON report to stdout")
    for flag, key in PARAM_FLAGS.items():
        p.add_argument(f"--{flag}", dest=f"param_{key}", type=parse_value, default=None)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="any other catalog parameter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eigenpath", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="show the experiment catalog").add_argument(
        "--json", action="store_true", help="print the catalog as JSON")

    v = sub.add_parser("verify-lemma", help="run one catalog experiment")
    v.add_argument("name", choices=sorted(CATALOG))
    _add_common(v)

    g = sub.add_parser("grover", help="traverse the Grover path in one regime")
    g.add_argument("--regime", choices=REGIMES, default="known-overlaps")
    _add_common(g)

    pa = sub.add_parser("path", help="traverse a chosen path in one regime")
    pa.add_argument("--kind", choices=PATH_KINDS, default="great-circle")
    pa.add_argument("--regime", choices=REGIMES, default="overlap-free")
    pa.add_argument("--speeds", help="comma-separated relative speeds for piecewise-speed paths")
    _add_common(pa)

    sw = sub.add_parser("sweep", help="run one experiment over a list of values of a parameter")
    sw.add_argument("name", choices=sorted(CATALOG))
    sw.add_argument("--param", required=True, help="parameter to vary")
    sw.add_argument("--values", required=True, help="comma-separated values")
    _add_common(sw)
    return parser


def _overrides(args) -> dict:
    out = {}
    for key in PARAM_FLAGS.values():
        val = getattr(args, f"param_{key}", None)
        if val is not None:
            out[key] = val
    for item in args.set:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip().replace("-", "_")] = parse_value(v)
    for key in INT_KEYS & out.keys():
        if isinstance(out[key], float) and out[key].is_integer():
            out[key] = int(out[key])
    return out


def _oracle_config(args) -> OracleConfig:
    return OracleConfig(mode=args.mode, epsilon=args.epsilon, cost_constant=args.cost_constant,
                        jitter=not args.no_jitter)


def _config_echo(args, cfg: OracleConfig, trials: Optional[int]) -> dict:
    return {"command": args.command, "seed": args.seed, "trials": trials,
            "oracle": {"mode": cfg.mode, "epsilon": cfg.epsilon, "cost_constant": cfg.cost_constant,
                       "jitter": cfg.jitter}}


def _run_one(name: str, overrides: dict, args, cfg: OracleConfig):
    params = resolve_params(name, overrides)
    return run_experiment(name, params, trials=args.trials, seed=args.seed, cfg=cfg)


def _emit(report: dict, records, args, verdicts) -> int:
    for v in verdicts:
        print(v.line())
    if args.out:
        write_outputs(args.out, report, records)
    if args.json:
        sys.stdout.write(report_text(report))
    return 0 if all(v.passed for v in verdicts) else 1


def _single(name: str, overrides: dict, args) -> int:
    cfg = _oracle_config(args)
    start = time.perf_counter()
    result = _run_one(name, overrides, args, cfg)
    report = build_report(result, _config_echo(args, cfg, len(result.records)))
    code = _emit(report, result.records, args, result.verdicts)
    print(f"wall-clock {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return code


def _sweep(args) -> int:
    cfg = _oracle_config(args)
    start = time.perf_counter()
    base = _overrides(args)
    key = args.param.replace("-", "_")
    values = [parse_value(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ValueError("--values is empty")
    aggregates, bounds, verdicts, configs = {}, {}, [], {}
    for val in values:
        result = _run_one(args.name, {**base, key: val}, args, cfg)
        label = f"{key}={val}"
        aggregates[label] = result.aggregates
        bounds[label] = result.bounds
        configs[label] = result.params
        for v in result.verdicts:
            verdicts.append(type(v)(f"[{label}] {v.name}", v.kind, v.estimate, v.stderr, v.target, v.passed))
        if args.out:
            with open(f"{args.out}-{key}-{val}.csv", "w", encoding="utf-8", newline="") as fh:
                fh.write(csv_text(result.records))
    config = _config_echo(args, cfg, args.trials)
    config.update(experiment=args.name, sweep_param=key, sweep_values=values, params=configs)
    report = assemble_report(config, aggregates, bounds, verdicts)
    for v in verdicts:
        print(v.line())
    if args.out:
        with open(args.out + ".json", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report_text(report))
    if args.json:
        sys.stdout.write(report_text(report))
    print(f"wall-clock {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return 0 if all(v.passed for v in verdicts) else 1


def _list(args) -> int:
    cat = list_experiments()
    if args.json:
        print(json.dumps(cat, indent=2))
        return 0
    for entry in cat:
        defaults = ", ".join(f"{k}={v}" for k, v in entry["defaults"].items())
        print(f"{entry['name']:<22} {entry['anchor']}")
        print(f"{'':<22} trials={entry['trials']} {defaults}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            return _list(args)
        if args.command == "verify-lemma":
            return _single(args.name, _overrides(args), args)
        if args.command == "grover":
            return _single(args.regime, {**_overrides(args), "path": "grover"}, args)
        if args.command == "path":
            over = {**_overrides(args), "path": args.kind}
            if args.speeds:
                over["speeds"] = args.speeds
            return _single(args.regime, over, args)
        if args.command == "sweep":
            return _sweep(args)
    except ValueError as err:
        print(f"eigenpath: error: {err}", file=sys.stderr)
        return 2
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
