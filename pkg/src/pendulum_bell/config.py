"""Experiment config files (JSON).

Layout::

    {
      "preset": "paper-2sqrt2",          # or an explicit "model" section, not both
      "clock": {"eve_period": 1, "sample_interval": 0.5, "phase": 0},
      "model": {
        "decks": [[e, e, e, e], ...],    # 4 rows in BK, BQ, RK, RQ order
        "objects": [e, e, e, e],         # HS, LS, HC, LC order; default uniform
        "decisions": [{"adam": "left", "eve": "left", "object": "Heavy", "deck": 1}, ...],
        "values": {"B": 1, "R": -1, ...},
        "snap_constants": false
      },
      "run": {"seed": 1, "trial_count": 8}
    }

An entry ``e`` is ``{"a": ..., "b": ...}`` meaning a + b*sqrt(2) (parts given as
integers or "p/q" strings), a "p/q" string, or a plain JSON number.  Plain
numbers are read as exact decimals.  With ``snap_constants`` set, a decimal
within 1e-12 of (1 - sqrt2/2)/4 or (1 + sqrt2/2)/4 is replaced by that exact
constant, so deck tables copied from a printout still sum to one.
"""

from __future__ import annotations

import json
import os
from decimal import Decimal
from typing import Any

from .exact import ExactNumber
from .model import (
    LABELS,
    DecisionTable,
    DeckDistribution,
    DeckTable,
    ModelValidationError,
    ObjectDistribution,
    Side,
    ValueAssignment,
    default_decisions,
    validate_model,
)
from .presets import HIGH, LOW, PRESETS, SNAP_TOLERANCE
from .runner import ExperimentConfig
from .scheduler import ClockConfig, ClockError
from .source import SourceModel

_TOP_KEYS = {"preset", "clock", "model", "run"}
_CLOCK_KEYS = {"eve_period", "adam_period", "sample_interval", "phase"}
_MODEL_KEYS = {"decks", "objects", "decisions", "values", "snap_constants"}
_RUN_KEYS = {"seed", "trial_count"}


class ConfigError(ValueError):
    pass


def _reject_unknown(section: dict, allowed: set[str], where: str) -> None:
    extra = set(section) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(extra)}")


def _section(doc: dict, key: str) -> dict:
    value = doc.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"'{key}' must be an object")
    return value


def parse_entry(raw: Any, snap: bool = False) -> ExactNumber:
    try:
        value = ExactNumber.from_json(raw)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad probability entry {raw!r}: {exc}") from exc
    if snap and isinstance(raw, (Decimal, float)):
        for const in (LOW, HIGH):
            if abs(float(value) - float(const)) <= SNAP_TOLERANCE:
                return const
    return value


def parse_decks(raw: Any, snap: bool = False) -> DeckTable:
    if not isinstance(raw, list) or len(raw) != 4:
        raise ConfigError("model.decks must be a list of 4 rows")
    rows = []
    for i, row in enumerate(raw, 1):
        if not isinstance(row, list) or len(row) != 4:
            raise ConfigError(f"model.decks row D{i} must have 4 entries (BK, BQ, RK, RQ)")
        rows.append(DeckDistribution(tuple(parse_entry(x, snap) for x in row)))
    return DeckTable(tuple(rows))


def parse_objects(raw: Any) -> ObjectDistribution:
    if not isinstance(raw, list) or len(raw) != 4:
        raise ConfigError("model.objects must list 4 probabilities (HS, LS, HC, LC)")
    return ObjectDistribution(tuple(parse_entry(x) for x in raw))


def parse_decisions(raw: Any) -> DecisionTable:
    if not isinstance(raw, list):
        raise ConfigError("model.decisions must be a list of rows")
    rows = []
    for i, row in enumerate(raw):
        if not isinstance(row, dict) or set(row) != {"adam", "eve", "object", "deck"}:
            raise ConfigError(f"model.decisions[{i}] needs exactly the keys adam, eve, object, deck")
        try:
            deck = row["deck"]
            if isinstance(deck, bool) or not isinstance(deck, int):
                raise ValueError(f"deck must be an integer, got {deck!r}")
            rows.append((Side(row["adam"]), Side(row["eve"]), str(row["object"]), deck))
        except ValueError as exc:
            raise ConfigError(f"model.decisions[{i}]: {exc}") from exc
    try:
        return DecisionTable.from_rows(rows)
    except ValueError as exc:
        raise ConfigError(f"model.decisions: {exc}") from exc


def parse_values(raw: Any) -> ValueAssignment:
    if not isinstance(raw, dict):
        raise ConfigError("model.values must map labels to +1/-1")
    try:
        return ValueAssignment.from_mapping(raw)
    except ValueError as exc:
        raise ConfigError(f"model.values: {exc}") from exc


def parse_model(doc: dict) -> SourceModel:
    preset = doc.get("preset")
    has_model = "model" in doc
    if preset is not None and has_model:
        raise ConfigError("'preset' and 'model' are mutually exclusive")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; known presets: {sorted(PRESETS)}")
        return SourceModel(PRESETS[preset])
    if not has_model:
        raise ConfigError("config needs either 'preset' or 'model'")
    m = _section(doc, "model")
    _reject_unknown(m, _MODEL_KEYS, "model")
    if "decks" not in m:
        raise ConfigError("model.decks is required")
    snap = m.get("snap_constants", False)
    if not isinstance(snap, bool):
        raise ConfigError("model.snap_constants must be true or false")
    decks = parse_decks(m["decks"], snap)
    objects = parse_objects(m["objects"]) if "objects" in m else ObjectDistribution()
    decisions = parse_decisions(m["decisions"]) if "decisions" in m else default_decisions()
    values = parse_values(m["values"]) if "values" in m else ValueAssignment()
    findings = validate_model(decks, objects, decisions)
    if findings:
        raise ModelValidationError(findings)
    return SourceModel(decks, objects, decisions, values)


def _number(raw: Any, where: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float, Decimal)):
        raise ConfigError(f"{where} must be a number, got {raw!r}")
    return float(raw)


def _integer(raw: Any, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ConfigError(f"{where} must be an integer, got {raw!r}")
    return raw


def parse_clock(section: dict) -> ClockConfig:
    _reject_unknown(section, _CLOCK_KEYS, "clock")
    kwargs = {k: _number(v, f"clock.{k}") for k, v in section.items()}
    try:
        return ClockConfig(**kwargs)
    except ClockError as exc:
        raise ConfigError(f"clock: {exc}") from exc


def config_from_dict(doc: Any, trials: int | None = None, seed: int | None = None) -> ExperimentConfig:
    """Build a validated config; ``trials``/``seed`` override the run section."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "config")
    model = parse_model(doc)
    clock = parse_clock(_section(doc, "clock"))
    run = _section(doc, "run")
    _reject_unknown(run, _RUN_KEYS, "run")
    trial_count = trials if trials is not None else _integer(run.get("trial_count", 0), "run.trial_count")
    seed_value = seed if seed is not None else _integer(run.get("seed", 0), "run.seed")
    try:
        return ExperimentConfig(model=model, clock=clock, seed=seed_value, trial_count=trial_count)
    except ValueError as exc:
        raise ConfigError(f"run: {exc}") from exc


def parse_config_text(text: str, name: str = "<config>") -> dict:
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{name}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def load_config(path: str | os.PathLike, trials: int | None = None, seed: int | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return config_from_dict(parse_config_text(text, os.fspath(path)), trials=trials, seed=seed)


def preset_config(name: str, trials: int = 0, seed: int = 0) -> ExperimentConfig:
    return config_from_dict({"preset": name, "run": {"seed": seed, "trial_count": trials}})


def decks_to_json(decks: DeckTable) -> list[list[dict]]:
    return [[p.to_json() for p in row.probs] for row in decks.rows]


def decisions_to_json(decisions: DecisionTable) -> list[dict]:
    return [
        {"adam": adam.value, "eve": eve.value, "object": obj.name, "deck": deck}
        for (adam, eve, obj), deck in decisions.items()
    ]


def model_to_json(model: SourceModel) -> dict:
    return {
        "decks": decks_to_json(model.decks),
        "objects": [p.to_json() for p in model.objects.probs],
        "decisions": decisions_to_json(model.decisions),
        "values": {lab: model.values[lab] for lab in LABELS},
    }


def config_to_dict(config: ExperimentConfig) -> dict:
    """Explicit form of ``config``; ``config_from_dict`` inverts it exactly."""
    clock = config.clock
    return {
        "clock": {"eve_period": clock.eve_period, "sample_interval": clock.sample_interval, "phase": clock.phase},
        "model": model_to_json(config.model),
        "run": {"seed": config.seed, "trial_count": config.trial_count},
    }


def dump_config(config: ExperimentConfig, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh, indent=2)
        fh.write("\n")
