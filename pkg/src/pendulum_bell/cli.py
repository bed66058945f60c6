"""Command-line entry point: ``pendulum-bell {exact,simulate,maximize,check}``.

Every command prints one JSON document on stdout.  Failures print
``{"error": {...}}`` instead and exit with status 1.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from typing import Sequence

from . import analysis
from .config import ConfigError, config_from_dict, load_config, model_to_json, decks_to_json
from .model import CARDS, ModelValidationError
from .optimizer import VERTEX_COUNT, local_bound, maximize_chsh, random_mixture_probe
from .presets import PRESETS
from .runner import ExperimentConfig, resolve_workers, run_experiment, write_jsonl
from .source import SourceModel


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would print text and exit 2
        raise CliError(message)


def _add_model_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    group = p.add_mutually_exclusive_group(required=required)
    group.add_argument("--config", metavar="PATH", help="experiment config file (JSON)")
    group.add_argument("--preset", choices=sorted(PRESETS), help="built-in deck table")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pendulum-bell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("exact", help="exact correlators and CHSH parameter")
    _add_model_args(p)
    p.add_argument("--csv", metavar="PATH", help="also write per-pair correlators as CSV")

    p = sub.add_parser("simulate", help="Monte Carlo run with a JSONL trial log")
    _add_model_args(p)
    p.add_argument("--trials", type=int, help="number of trials (overrides run.trial_count)")
    p.add_argument("--seed", type=int, help="64-bit seed (overrides run.seed)")
    p.add_argument("--out", metavar="PATH", help="write the trial log here (JSONL)")
    p.add_argument("--blind", action="store_true", help="log settings and outcomes only")
    p.add_argument("--workers", type=int, help="parallel workers (results never depend on this)")
    p.add_argument("--csv", metavar="PATH", help="also write per-pair estimates as CSV")

    p = sub.add_parser("maximize", help="vertex enumeration of the CHSH parameter over deck tables")
    _add_model_args(p, required=False)
    p.add_argument("--witness-out", metavar="PATH", help="write a config using the optimal decks")
    p.add_argument("--probe", type=int, default=0, metavar="N", help="also sample N interior deck tables")
    p.add_argument("--probe-seed", type=int, default=0)

    p = sub.add_parser("check", help="validation, no-signalling, measurement dependence, local bound")
    _add_model_args(p)
    p.add_argument("--full-state", action="store_true", help="measure dependence on (deck, card, object)")
    return parser


def _config(args, trials: int | None = None, seed: int | None = None) -> ExperimentConfig:
    if getattr(args, "config", None):
        return load_config(args.config, trials=trials, seed=seed)
    if getattr(args, "preset", None):
        return config_from_dict({"preset": args.preset}, trials=trials, seed=seed)
    return config_from_dict({"preset": "paper-2sqrt2"}, trials=trials, seed=seed)


def _model_label(args) -> str:
    return args.preset or args.config or "default"


def _write_csv(path: str, report: analysis.ChshReport) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["adam_setting", "eve_setting", "sign", "value", "stderr", "count", "exact_a", "exact_b"])
        for sign, c in zip(analysis.CHSH_SIGNS, report.correlators):
            exact = c.exact.to_json() if c.exact is not None else {"a": "", "b": ""}
            writer.writerow([c.pair[0].value, c.pair[1].value, sign, repr(c.value),
                             "" if c.stderr is None else repr(c.stderr),
                             "" if c.count is None else c.count, exact["a"], exact["b"]])


def cmd_exact(args) -> dict:
    config = _config(args)
    start = time.perf_counter()
    report = analysis.chsh_exact(config.model)
    out = {"command": "exact", "model": _model_label(args), **report.to_json()}
    out["seconds"] = time.perf_counter() - start
    if args.csv:
        _write_csv(args.csv, report)
    return out


def cmd_simulate(args) -> dict:
    config = _config(args, trials=args.trials, seed=args.seed)
    start = time.perf_counter()
    log = run_experiment(config, workers=args.workers)
    if args.out:
        write_jsonl(log, args.out, blind=args.blind)
    report = analysis.chsh_estimate(log)
    exact = analysis.chsh_exact(config.model)
    comparison = []
    for est, ex in zip(report.correlators, exact.correlators):
        diff = est.estimate - float(ex.exact)
        comparison.append({
            "adam_setting": est.pair[0].value,
            "eve_setting": est.pair[1].value,
            "exact": ex.exact.to_json(),
            "difference": diff,
            "z": diff / est.stderr if est.stderr else (0.0 if diff == 0 else float("inf")),
        })
    out = {
        "command": "simulate",
        "model": _model_label(args),
        "trials": config.trial_count,
        "seed": config.seed,
        "workers": resolve_workers(args.workers),
        "log": args.out,
        "blind": bool(args.blind),
        **report.to_json(),
        "exact_E": {"exact": exact.exact.to_json(), "float": float(exact.exact)},
        "E_difference": report.estimate - float(exact.exact),
        "versus_exact": comparison,
        "seconds": time.perf_counter() - start,
    }
    if args.csv:
        _write_csv(args.csv, report)
    return out


def cmd_maximize(args) -> dict:
    config = _config(args)
    model = config.model
    start = time.perf_counter()
    result = maximize_chsh(model.decisions, model.objects, model.values)
    witness_model = SourceModel(result.witness, model.objects, model.decisions, model.values)
    check = analysis.chsh_exact(witness_model)
    out = {
        "command": "maximize",
        "best_E": {"exact": result.best.to_json(), "float": float(result.best)},
        "enumerated": result.enumerated,
        "vertex_count": VERTEX_COUNT,
        "vertex": [CARDS[i].name for i in result.vertex],
        "witness": {"decks": decks_to_json(result.witness)},
        "witness_correlators": [c.to_json() for c in check.correlators],
    }
    if args.probe:
        probe = random_mixture_probe(model.decisions, model.objects, model.values, args.probe, args.probe_seed)
        out["probe"] = {"samples": args.probe, "seed": args.probe_seed,
                        "best_E": {"exact": probe.to_json(), "float": float(probe)}}
    if args.witness_out:
        doc = {"model": model_to_json(witness_model),
               "run": {"seed": config.seed, "trial_count": config.trial_count}}
        with open(args.witness_out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        out["witness_config"] = args.witness_out
    out["seconds"] = time.perf_counter() - start
    return out


def cmd_check(args) -> dict:
    config = _config(args)
    model = config.model
    dependence = analysis.measurement_dependence(model, full_state=args.full_state)
    bound = local_bound(model.values)
    return {
        "command": "check",
        "model": _model_label(args),
        # loading already rejects invalid models, so reaching here means none
        "validation": [],
        "no_signaling": analysis.no_signaling_report(model).to_json(),
        "measurement_dependence": dependence.to_json(),
        "local_bound": {"exact": bound.to_json(), "float": float(bound)},
        "E": {"exact": analysis.chsh_exact(model).exact.to_json()},
    }


COMMANDS = {"exact": cmd_exact, "simulate": cmd_simulate, "maximize": cmd_maximize, "check": cmd_check}


def _error(kind: str, message: str, **extra) -> dict:
    return {"error": {"type": kind, "message": message, **extra}}


def run(argv: Sequence[str] | None = None) -> tuple[int, dict]:
    try:
        args = build_parser().parse_args(argv)
        return 0, COMMANDS[args.command](args)
    except CliError as exc:
        return 1, _error("usage", str(exc))
    except ModelValidationError as exc:
        return 1, _error("validation", str(exc), findings=[f.to_json() for f in exc.findings])
    except ConfigError as exc:
        return 1, _error("config", str(exc))
    except analysis.UnderSampledError as exc:
        return 1, _error("under-sampled", str(exc))
    except (OSError, ValueError, KeyError, IndexError) as exc:
        return 1, _error(type(exc).__name__, str(exc))


def main(argv: Sequence[str] | None = None) -> int:
    status, doc = run(argv)
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
