"""Command-line driver for matches, processes, tables, oracles and baselines.

All subcommands emit JSON by default (CSV where noted) and are fully
determined by their flags; identical invocations produce identical
bytes.  Flags may also be read from a JSON config file via --config,
with explicit flags taking precedence.  Exit codes: 0 success, 1 usage
error, 2 runtime fault.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .balancer import balancer_client_strategy
from .baselines import gnm_max_degree, random_play
from .biased import (
    bias_thresholds,
    mega_round_waiter,
    small_bias_client_strategy,
    small_bias_params,
    smallest_certified_degree,
    es_client_strategy,
)
from .forcing import lower_bound_waiter
from .game import GameConfig, GameError, edge_count, run_match
from .oracle import GameSolver, oracle_strategy, solve_with_report
from .process import process_stats, run_process
from .strategies import GreedyWaiter, RandomClient, RandomWaiter
from .walks import build_walk_table


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


def _strategy_rng(seed: int, which: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(which,)))


def make_waiter(name: str, config: GameConfig, rng: np.random.Generator):
    if name == "random":
        return RandomWaiter(rng)
    if name == "greedy":
        return GreedyWaiter(by="advantage")
    if name == "lowerbound":
        return lower_bound_waiter(config.n)
    if name == "megaround":
        return mega_round_waiter(config.n, config.q)
    if name == "oracle":
        return oracle_strategy(config.n, config.q, "waiter")
    raise UsageError(f"unknown waiter strategy {name!r}")


def make_client(name: str, config: GameConfig, rng: np.random.Generator):
    if name == "random":
        return RandomClient(rng)
    if name == "balancer":
        return balancer_client_strategy(config.n)
    if name == "es":
        return es_client_strategy(config.n, config.q, smallest_certified_degree(config.n, config.q))
    if name == "smallbias":
        return small_bias_client_strategy(config.n, config.q)
    if name == "oracle":
        return oracle_strategy(config.n, config.q, "client")
    raise UsageError(f"unknown client strategy {name!r}")


# ----------------------------------------------------------------------
# subcommand implementations, each returning a JSON-ready object
# ----------------------------------------------------------------------

def _cmd_simulate(p: dict) -> dict:
    config = GameConfig(n=p["n"], q=p["q"], seed=p.get("seed", 0))
    waiter = make_waiter(p.get("waiter", "random"), config, _strategy_rng(config.seed, 0))
    client = make_client(p.get("client", "random"), config, _strategy_rng(config.seed, 1))
    record = run_match(config, waiter, client, record_transcript=not p.get("no_transcript", False))
    return record.to_json_dict()


def _cmd_process(p: dict) -> dict:
    balls = p["balls"]
    rounds = p["rounds"]
    threshold = p.get("stats_threshold")
    if threshold is None:
        threshold = math.floor(0.1 * math.sqrt(rounds)) if rounds > 0 else 0
    counts = run_process(balls, rounds)
    return {
        "balls": balls,
        "rounds": rounds,
        "counts": {str(i): c for i, c in sorted(counts.items())},
        "stats": process_stats(counts, balls, rounds, threshold),
    }


def _cmd_table(p: dict) -> dict:
    table = build_walk_table(p["max_k"])
    return {"max_k": table.max_k, "rows": [[k, m, prob] for k, m, prob in table.rows()]}


def _cmd_thresholds(p: dict) -> dict:
    t = bias_thresholds(p["n"], p["q"])
    return {"f": t.f, "D": t.D, "d": t.d}


def _cmd_params(p: dict) -> dict:
    return small_bias_params(p["n"], p["q"]).as_dict()


def _cmd_oracle(p: dict) -> dict:
    report = solve_with_report(
        p["n"], p["q"], canonicalize=p.get("canonicalize", False), max_edges=p.get("max_edges", 15)
    )
    return {"value": report.value, "states_visited": report.states_visited, "seconds": report.seconds}


def _cmd_baseline(p: dict) -> dict:
    kind = p.get("kind", "gnm")
    seed = p.get("seed", 0)
    samples = p.get("samples", 10)
    if kind == "gnm":
        m = p.get("m")
        if m is None:
            m = edge_count(p["n"]) // 2
        return gnm_max_degree(p["n"], m, seed, samples).as_dict()
    if kind == "randomplay":
        config = GameConfig(n=p["n"], q=p.get("q", 1), seed=seed)
        return random_play(config, seed, samples).as_dict()
    raise UsageError(f"unknown baseline kind {kind!r}")


_DISPATCH = {
    "simulate": _cmd_simulate,
    "process": _cmd_process,
    "table": _cmd_table,
    "thresholds": _cmd_thresholds,
    "params": _cmd_params,
    "oracle": _cmd_oracle,
    "baseline": _cmd_baseline,
}


def run_suite(specs: list[dict]) -> tuple[dict, int]:
    """Execute a list of specs in parallel; report keyed by spec id."""
    workers = int(os.environ.get("DEGREEFORGE_THREADS", "0")) or min(4, max(1, len(specs)))

    def one(spec: dict) -> tuple[str, dict]:
        spec_id = str(spec.get("id", spec.get("cmd", "spec")))
        cmd = spec.get("cmd")
        try:
            if cmd not in _DISPATCH:
                raise UsageError(f"unknown subcommand {cmd!r}")
            result = _DISPATCH[cmd]({k: v for k, v in spec.items() if k not in ("id", "cmd")})
            return spec_id, {"status": "ok", "seed": spec.get("seed", 0), "result": result}
        except (GameError, UsageError, ValueError) as exc:
            return spec_id, {"status": "error", "error": str(exc), "kind": type(exc).__name__}

    report: dict[str, dict] = {}
    if specs:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for spec_id, entry in pool.map(one, specs):
                report[spec_id] = entry
    failed = sum(1 for entry in report.values() if entry["status"] != "ok")
    return {"specs": report}, (2 if failed else 0)


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="degreeforge", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="JSON file with default flag values")
        sp.add_argument("--out", help="write output to this path instead of stdout")
        sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = sub.add_parser("simulate", help="play one match between named strategies")
    sp.add_argument("--n", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--waiter", default=None)
    sp.add_argument("--client", default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--no-transcript", action="store_true", dest="no_transcript")
    add_common(sp)

    sp = sub.add_parser("process", help="run the balls-in-boxes diffusion")
    sp.add_argument("--balls", type=int)
    sp.add_argument("--rounds", type=int)
    sp.add_argument("--stats-threshold", type=float, dest="stats_threshold", default=None)
    add_common(sp)

    sp = sub.add_parser("table", help="dump the walk exceedance table as CSV")
    sp.add_argument("--max-k", type=int, dest="max_k")
    add_common(sp)

    sp = sub.add_parser("thresholds", help="integer degree thresholds for (n, q)")
    sp.add_argument("--n", type=int)
    sp.add_argument("--q", type=int)
    add_common(sp)

    sp = sub.add_parser("params", help="small-bias potential parameters for (n, q)")
    sp.add_argument("--n", type=int)
    sp.add_argument("--q", type=int)
    add_common(sp)

    sp = sub.add_parser("oracle", help="exact value of a small board")
    sp.add_argument("--n", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--canonicalize", action="store_true")
    sp.add_argument("--max-edges", type=int, dest="max_edges", default=None)
    add_common(sp)

    sp = sub.add_parser("baseline", help="random graph / random play statistics")
    sp.add_argument("--kind", choices=["gnm", "randomplay"], default=None)
    sp.add_argument("--n", type=int)
    sp.add_argument("--q", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    add_common(sp)

    sp = sub.add_parser("suite", help="run a JSON list of specs and aggregate a report")
    sp.add_argument("specs", help="path to a JSON file holding a list of spec objects")
    add_common(sp)
    return parser


def _merge_params(args: argparse.Namespace) -> dict:
    params: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise UsageError("--config must hold a flat JSON object")
        params.update(loaded)
    for key, value in vars(args).items():
        if key in ("cmd", "config", "out", "format", "specs"):
            continue
        if value is not None and value is not False:
            params[key] = value
    return params


def _emit_csv(cmd: str, result: dict, out) -> None:
    if cmd == "table":
        out.write("k,M,p\n")
        for k, m, prob in result["rows"]:
            out.write(f"{k},{m},{prob!r}\n")
    elif cmd == "process":
        out.write("box,count\n")
        for box, count in sorted(result["counts"].items(), key=lambda kv: int(kv[0])):
            out.write(f"{box},{count}\n")
        out.write(json.dumps(result["stats"], sort_keys=True) + "\n")
    else:
        header = sorted(result.keys())
        out.write(",".join(header) + "\n")
        out.write(",".join(json.dumps(result[h]) for h in header) + "\n")


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.cmd == "suite":
            with open(args.specs) as fh:
                specs = json.load(fh)
            if not isinstance(specs, list):
                raise UsageError("suite file must hold a JSON list")
            report, code = run_suite(specs)
            payload = json.dumps(report, sort_keys=True) + "\n"
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(payload)
            else:
                sys.stdout.write(payload)
            return code
        params = _merge_params(args)
        result = _DISPATCH[args.cmd](params)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (GameError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        if args.format == "csv":
            _emit_csv(args.cmd, result, out)
        else:
            out.write(json.dumps(result, sort_keys=True) + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
