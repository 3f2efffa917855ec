"""Command-line entry point: ``wsn-lifetime run|sweep|check``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Optional, Sequence

from .engine import run_simulation
from .metrics import LifetimeSummary, summarize_replicates, summarize_run, write_round_csv
from .model import ScenarioSpec, Variant, default_scenario, load_config

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
DEFAULT_DIMS = "200,250,350,450"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def _positive_dim(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"dimension must be a number, got {text!r}") from None
    if not value > 0:
        raise UsageError(f"dimension must be positive, got {text}")
    return value


def _dim_label(dim: float) -> str:
    return str(int(dim)) if float(dim).is_integer() else str(dim)


def build_spec(
    scenario: Optional[str],
    dim: Optional[float],
    seed: Optional[int],
    config: Optional[dict[str, Any]] = None,
    rounds: Optional[int] = None,
    nodes: Optional[int] = None,
) -> ScenarioSpec:
    """Defaults, then config file, then explicit flags."""
    config = config or {}
    label = scenario or config.get("variant")
    if label is None:
        raise UsageError("no scenario given (use --scenario or set 'variant' in --config)")
    variant = Variant.parse(label)
    dim_flag = dim
    if dim is None:
        dim = (config.get("field") or {}).get("xm")
        if dim is None:
            raise UsageError("no dimension given (use --dim or set field.xm in --config)")
    merged = _deep_merge(default_scenario(variant, dim).to_dict(), config)
    merged["variant"] = variant.value
    if dim_flag is not None:
        merged["field"] = {"xm": float(dim_flag), "ym": float(dim_flag)}
    if seed is not None:
        merged["rng_seed"] = seed
    if rounds is not None:
        merged["max_rounds"] = rounds
    if nodes is not None:
        merged["num_nodes"] = nodes
    return ScenarioSpec.from_dict(merged)


def _run_one(spec: ScenarioSpec, out_dir: Path) -> LifetimeSummary:
    records = run_simulation(spec)
    label = spec.variant.value
    dim = _dim_label(spec.dim)
    write_round_csv(records, out_dir / f"{label}_{dim}_{spec.rng_seed}.csv")
    return summarize_run(records, label, spec.dim, spec.rng_seed)


def _prepare_out(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"output directory {out} is not writable: {exc.strerror or exc}") from None
    return out


def cmd_run(args) -> int:
    config = load_config(args.config) if args.config else None
    spec = build_spec(args.scenario, args.dim, args.seed, config, args.rounds, args.nodes)
    out = _prepare_out(args.out)
    summary = _run_one(spec, out)
    print(
        f"{summary.scenario} dim={_dim_label(summary.dim)} seed={summary.seed} "
        f"first_dead={summary.first_dead_round} quarter_dead={summary.quarter_dead_round} "
        f"last_alive={summary.last_alive_round}"
    )
    return EXIT_OK


def _parse_list(text: str, kind: str) -> list[str]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError(f"empty {kind} list")
    return items


def sweep_specs(
    scenarios: Sequence[Variant], dims: Sequence[float], seeds: Sequence[int], config: Optional[dict] = None
) -> list[ScenarioSpec]:
    return [
        build_spec(v.value, d, s, config)
        for v in scenarios
        for d in dims
        for s in seeds
    ]


def summary_document(summaries: Sequence[LifetimeSummary]) -> dict[str, dict[str, dict]]:
    cells: dict[tuple[str, float], list[LifetimeSummary]] = {}
    for s in summaries:
        cells.setdefault((s.scenario, s.dim), []).append(s)
    doc: dict[str, dict[str, dict]] = {}
    for (scenario, dim), group in cells.items():
        doc.setdefault(scenario, {})[_dim_label(dim)] = summarize_replicates(group)
    return doc


def cmd_sweep(args) -> int:
    if args.scenarios.strip().lower() == "all":
        scenarios = list(Variant)
    else:
        scenarios = [Variant.parse(s) for s in _parse_list(args.scenarios, "scenario")]
    dims = [_positive_dim(d) for d in _parse_list(args.dims, "dimension")]
    if args.seeds < 1:
        raise UsageError(f"--seeds must be at least 1, got {args.seeds}")
    config = load_config(args.config) if args.config else None
    specs = sweep_specs(scenarios, dims, range(1, args.seeds + 1), config)
    out = _prepare_out(args.out)

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            summaries = list(pool.map(_run_one, specs, [out] * len(specs)))
    else:
        summaries = [_run_one(spec, out) for spec in specs]

    doc = summary_document(summaries)
    (out / "summary.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for scenario, by_dim in doc.items():
        for dim, metrics in by_dim.items():
            q = metrics["quarter_dead_round"]
            f = metrics["first_dead_round"]
            print(f"{scenario:>6} {dim:>5}  first_dead={f['median']}  quarter_dead={q['median']}")
    print(f"{len(specs)} runs -> {out}")
    return EXIT_OK


def cmd_check(args) -> int:
    from .checks import run_checks

    results = run_checks()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_RUNTIME


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wsn-lifetime", description="WSN lifetime simulator (LEACH, mobile sink, RN relays)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate one scenario")
    run.add_argument("--scenario", help="static|ms1|ms2|ms3|ms4|pms2|pms4")
    run.add_argument("--dim", type=_positive_dim, help="field side length in metres")
    run.add_argument("--seed", type=int)
    run.add_argument("--rounds", type=int)
    run.add_argument("--nodes", type=int)
    run.add_argument("--config", help="ScenarioSpec JSON")
    run.add_argument("--out", default="out")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="scenario x dimension x seed matrix")
    sweep.add_argument("--dims", default=DEFAULT_DIMS)
    sweep.add_argument("--scenarios", default="all")
    sweep.add_argument("--seeds", type=int, default=21, help="runs seeds 1..k")
    sweep.add_argument("--config", help="ScenarioSpec JSON applied to every run")
    sweep.add_argument("--out", default="out")
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.set_defaults(func=cmd_sweep)

    check = sub.add_parser("check", help="run the built-in invariant checks")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = make_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, FileNotFoundError) else EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
