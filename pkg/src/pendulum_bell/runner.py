"""Trial generation and JSONL trial logs."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .model import (
    ADAM_SETTINGS,
    CARDS,
    EVE_SETTINGS,
    LABELS,
    OBJECTS,
    SIDES,
    AdamSetting,
    Card,
    EveSetting,
    ObjectKind,
    Side,
    card_label,
    object_label,
)
from .scheduler import ClockConfig, emission_time, measurement_time, settings_for_trial, sides_for_trials
from .source import (
    CARD_SLOT,
    OBJECT_SLOT,
    RngStream,
    SourceModel,
    cdf_matrix,
    deck_lookup_array,
    draw_card,
    draw_object,
    float_cdf,
    inverse_cdf_many,
    measure_adam,
    measure_eve,
    select_deck,
)

CHUNK_TRIALS = 1 << 16
WORKERS_ENV = "BELL_NUM_WORKERS"


@dataclass(frozen=True)
class ExperimentConfig:
    model: SourceModel
    clock: ClockConfig = field(default_factory=ClockConfig)
    seed: int = 0
    trial_count: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.trial_count, bool) or int(self.trial_count) != self.trial_count or self.trial_count < 0:
            raise ValueError(f"trial_count must be a nonnegative integer, got {self.trial_count!r}")
        RngStream(self.seed)  # validates the seed
        if self.clock.trial_count != self.trial_count:
            object.__setattr__(self, "clock", replace(self.clock, trial_count=int(self.trial_count)))


@dataclass(frozen=True)
class TrialRecord:
    n: int
    t: float
    emission_t: float | None
    adam_setting: AdamSetting
    eve_setting: EveSetting
    adam_side: Side | None
    eve_side: Side | None
    deck: int | None
    card: Card | None
    object: ObjectKind | None
    adam_outcome: tuple[str, int]
    eve_outcome: tuple[str, int]

    @property
    def blinded(self) -> bool:
        return self.card is None

    def to_json(self, blind: bool = False) -> dict:
        if blind:
            return {
                "n": self.n,
                "t": self.t,
                "adam_setting": self.adam_setting.value,
                "eve_setting": self.eve_setting.value,
                "adam_outcome": list(self.adam_outcome),
                "eve_outcome": list(self.eve_outcome),
            }
        return {
            "n": self.n,
            "t": self.t,
            "emission_t": self.emission_t,
            "adam_setting": self.adam_setting.value,
            "eve_setting": self.eve_setting.value,
            "adam_side": self.adam_side.value,
            "eve_side": self.eve_side.value,
            "deck": self.deck,
            "card": self.card.name,
            "object": self.object.name,
            "adam_outcome": list(self.adam_outcome),
            "eve_outcome": list(self.eve_outcome),
        }

    @classmethod
    def from_json(cls, obj: dict) -> TrialRecord:
        hidden = "card" in obj
        return cls(
            n=int(obj["n"]),
            t=float(obj["t"]),
            emission_t=float(obj["emission_t"]) if hidden else None,
            adam_setting=AdamSetting(obj["adam_setting"]),
            eve_setting=EveSetting(obj["eve_setting"]),
            adam_side=Side(obj["adam_side"]) if hidden else None,
            eve_side=Side(obj["eve_side"]) if hidden else None,
            deck=int(obj["deck"]) if hidden else None,
            card=Card[obj["card"]] if hidden else None,
            object=ObjectKind[obj["object"]] if hidden else None,
            adam_outcome=_outcome(obj["adam_outcome"]),
            eve_outcome=_outcome(obj["eve_outcome"]),
        )


def _outcome(raw) -> tuple[str, int]:
    label, value = raw
    if value not in (1, -1):
        raise ValueError(f"outcome value must be +1 or -1, got {value!r}")
    return str(label), int(value)


def run_trial(config: ExperimentConfig, n: int) -> TrialRecord:
    """One trial, composed step by step from the scheduler, source and stations."""
    adam_setting, eve_setting, adam_side, eve_side = settings_for_trial(config.clock, n)
    emitted = emission_time(config.clock, n)
    rng = RngStream(config.seed)
    model = config.model
    obj = draw_object(model.objects, rng.uniform(n, OBJECT_SLOT))
    # the source reads the settings one Adam period ahead off its own pendulum copies
    deck = select_deck(model.decisions, adam_side, eve_side, obj)
    card = draw_card(model.decks.deck(deck), rng.uniform(n, CARD_SLOT))
    return TrialRecord(
        n=n,
        t=measurement_time(config.clock, n),
        emission_t=emitted,
        adam_setting=adam_setting,
        eve_setting=eve_setting,
        adam_side=adam_side,
        eve_side=eve_side,
        deck=deck,
        card=card,
        object=obj,
        adam_outcome=measure_adam(card, adam_setting, model.values),
        eve_outcome=measure_eve(obj, eve_setting, model.values),
    )


# label/sign lookup tables indexed [setting_index, card_or_object_index]
def _station_tables(model: SourceModel):
    va = model.values
    adam_labels = np.array([[card_label(c, s) for c in CARDS] for s in ADAM_SETTINGS])
    eve_labels = np.array([[object_label(o, s) for o in OBJECTS] for s in EVE_SETTINGS])
    adam_signs = np.vectorize(va.__getitem__, otypes=[np.int8])(adam_labels)
    eve_signs = np.vectorize(va.__getitem__, otypes=[np.int8])(eve_labels)
    return adam_labels, adam_signs, eve_labels, eve_signs


@dataclass
class TrialLog:
    """Column store for a sequence of trials, ordered by trial index.

    Hidden-variable columns (``deck``, ``card``, ``obj``) and ``emission_t``
    are ``None`` for blinded logs.
    """

    n: np.ndarray
    t: np.ndarray
    adam_right: np.ndarray
    eve_right: np.ndarray
    adam_label: np.ndarray
    adam_sign: np.ndarray
    eve_label: np.ndarray
    eve_sign: np.ndarray
    emission_t: np.ndarray | None = None
    deck: np.ndarray | None = None
    card: np.ndarray | None = None
    obj: np.ndarray | None = None

    def __len__(self) -> int:
        return int(self.n.shape[0])

    @property
    def blinded(self) -> bool:
        return self.card is None

    def record(self, i: int) -> TrialRecord:
        hidden = not self.blinded
        ar, er = bool(self.adam_right[i]), bool(self.eve_right[i])
        return TrialRecord(
            n=int(self.n[i]),
            t=float(self.t[i]),
            emission_t=float(self.emission_t[i]) if hidden else None,
            adam_setting=ADAM_SETTINGS[ar],
            eve_setting=EVE_SETTINGS[er],
            adam_side=SIDES[ar] if hidden else None,
            eve_side=SIDES[er] if hidden else None,
            deck=int(self.deck[i]) if hidden else None,
            card=CARDS[int(self.card[i])] if hidden else None,
            object=OBJECTS[int(self.obj[i])] if hidden else None,
            adam_outcome=(str(self.adam_label[i]), int(self.adam_sign[i])),
            eve_outcome=(str(self.eve_label[i]), int(self.eve_sign[i])),
        )

    def __iter__(self) -> Iterator[TrialRecord]:
        for i in range(len(self)):
            yield self.record(i)

    def __getitem__(self, i: int) -> TrialRecord:
        return self.record(i)

    @classmethod
    def from_records(cls, records: Sequence[TrialRecord]) -> TrialLog:
        records = list(records)
        hidden = bool(records) and all(not r.blinded for r in records)
        cols = dict(
            n=np.array([r.n for r in records], dtype=np.int64),
            t=np.array([r.t for r in records], dtype=np.float64),
            adam_right=np.array([r.adam_setting is AdamSetting.VALUE for r in records], dtype=bool),
            eve_right=np.array([r.eve_setting is EveSetting.SHAPE for r in records], dtype=bool),
            adam_label=np.array([r.adam_outcome[0] for r in records], dtype="<U1"),
            adam_sign=np.array([r.adam_outcome[1] for r in records], dtype=np.int8),
            eve_label=np.array([r.eve_outcome[0] for r in records], dtype="<U1"),
            eve_sign=np.array([r.eve_outcome[1] for r in records], dtype=np.int8),
        )
        if hidden:
            cols.update(
                emission_t=np.array([r.emission_t for r in records], dtype=np.float64),
                deck=np.array([r.deck for r in records], dtype=np.int64),
                card=np.array([r.card.index for r in records], dtype=np.int64),
                obj=np.array([r.object.index for r in records], dtype=np.int64),
            )
        return cls(**cols)

    @classmethod
    def concatenate(cls, parts: Sequence[TrialLog]) -> TrialLog:
        if not parts:
            return _empty_log()
        names = ["n", "t", "adam_right", "eve_right", "adam_label", "adam_sign", "eve_label", "eve_sign"]
        optional = ["emission_t", "deck", "card", "obj"]
        cols = {k: np.concatenate([getattr(p, k) for p in parts]) for k in names}
        if all(p.card is not None for p in parts):
            cols.update({k: np.concatenate([getattr(p, k) for p in parts]) for k in optional})
        return cls(**cols)

    def blind(self) -> TrialLog:
        return replace(self, emission_t=None, deck=None, card=None, obj=None)


def _empty_log() -> TrialLog:
    return TrialLog(
        n=np.zeros(0, np.int64), t=np.zeros(0), adam_right=np.zeros(0, bool), eve_right=np.zeros(0, bool),
        adam_label=np.zeros(0, "<U1"), adam_sign=np.zeros(0, np.int8),
        eve_label=np.zeros(0, "<U1"), eve_sign=np.zeros(0, np.int8),
        emission_t=np.zeros(0), deck=np.zeros(0, np.int64), card=np.zeros(0, np.int64), obj=np.zeros(0, np.int64),
    )


def simulate_block(config: ExperimentConfig, start: int, stop: int) -> TrialLog:
    """Trials ``start..stop-1`` in one vectorised pass."""
    if not 0 <= start <= stop <= config.trial_count:
        raise IndexError(f"trial range [{start}, {stop}) outside [0, {config.trial_count})")
    model = config.model
    n = np.arange(start, stop, dtype=np.int64)
    adam_left, eve_left = sides_for_trials(config.clock, n)
    adam_right = ~adam_left
    eve_right = ~eve_left
    t = n.astype(np.float64) * config.clock.sample_interval + config.clock.phase
    u = RngStream(config.seed).uniforms(start, stop)
    obj = inverse_cdf_many(np.array(float_cdf(model.objects.probs)), u[:, OBJECT_SLOT])
    deck = deck_lookup_array(model.decisions)[adam_right.astype(np.int64), eve_right.astype(np.int64), obj]
    card = inverse_cdf_many(cdf_matrix(model.decks)[deck - 1], u[:, CARD_SLOT])
    adam_labels, adam_signs, eve_labels, eve_signs = _station_tables(model)
    ai = adam_right.astype(np.int64)
    ei = eve_right.astype(np.int64)
    return TrialLog(
        n=n,
        t=t,
        adam_right=adam_right,
        eve_right=eve_right,
        adam_label=adam_labels[ai, card],
        adam_sign=adam_signs[ai, card],
        eve_label=eve_labels[ei, obj],
        eve_sign=eve_signs[ei, obj],
        emission_t=t - config.clock.adam_period,
        deck=deck,
        card=card,
        obj=obj,
    )


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit request, else CPU count, capped by ``BELL_NUM_WORKERS``."""
    count = workers if workers is not None else (os.cpu_count() or 1)
    cap = os.environ.get(WORKERS_ENV)
    if cap:
        count = min(count, int(cap))
    return max(1, int(count))


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> TrialLog:
    """All trials of ``config``. The result does not depend on ``workers``."""
    total = config.trial_count
    ranges = [(s, min(s + CHUNK_TRIALS, total)) for s in range(0, total, CHUNK_TRIALS)]
    if not ranges:
        return _empty_log()
    nworkers = min(resolve_workers(workers), len(ranges))
    if nworkers == 1:
        parts = [simulate_block(config, a, b) for a, b in ranges]
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            parts = list(pool.map(lambda r: simulate_block(config, *r), ranges))
    return TrialLog.concatenate(parts)


# JSONL ---------------------------------------------------------------------

_SEPARATORS = (",", ":")


def _dumps(obj) -> str:
    return json.dumps(obj, separators=_SEPARATORS)


_SORTED_LABELS = np.array(sorted(LABELS))


def _label_codes(labels: np.ndarray) -> np.ndarray:
    return np.searchsorted(_SORTED_LABELS, labels).astype(np.int64)


def _tail_table(log: TrialLog, blind: bool) -> tuple[np.ndarray, list[str]]:
    """Per-line suffix after the numeric fields, deduplicated by category code."""
    cols = [log.adam_right.astype(np.int64), log.eve_right.astype(np.int64)]
    if blind:
        cols += [
            _label_codes(log.adam_label), (log.adam_sign > 0).astype(np.int64),
            _label_codes(log.eve_label), (log.eve_sign > 0).astype(np.int64),
        ]
    else:
        # outcomes are a function of these given the model
        cols += [log.deck, log.card, log.obj]
    codes = np.zeros(len(log), dtype=np.int64)
    for c in cols:
        codes = codes * 16 + c
    _, first, inverse = np.unique(codes, return_index=True, return_inverse=True)
    tails = []
    for i in first.tolist():
        rec = log.record(i).to_json(blind=blind)
        for k in ("n", "t", "emission_t"):
            rec.pop(k, None)
        tails.append(_dumps(rec)[1:])
    return inverse.reshape(-1), tails


def iter_jsonl_lines(log: TrialLog, blind: bool = False) -> Iterator[str]:
    """Lines identical to ``json.dumps(record.to_json(blind), separators=(",", ":"))``."""
    if len(log) == 0:
        return
    blind = blind or log.blinded
    inverse, tails = _tail_table(log, blind)
    if blind:
        for n, t, k in zip(log.n.tolist(), log.t.tolist(), inverse.tolist()):
            yield f'{{"n":{n},"t":{float.__repr__(t)},{tails[k]}'
    else:
        for n, t, e, k in zip(log.n.tolist(), log.t.tolist(), log.emission_t.tolist(), inverse.tolist()):
            yield f'{{"n":{n},"t":{float.__repr__(t)},"emission_t":{float.__repr__(e)},{tails[k]}'


def write_jsonl(log: TrialLog, path: str | os.PathLike, blind: bool = False) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        batch: list[str] = []
        for line in iter_jsonl_lines(log, blind=blind):
            batch.append(line)
            if len(batch) >= 65536:
                fh.write("\n".join(batch) + "\n")
                batch.clear()
        if batch:
            fh.write("\n".join(batch) + "\n")


def read_jsonl(path: str | os.PathLike) -> TrialLog:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(TrialRecord.from_json(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"{Path(path).name}:{lineno}: bad trial record: {exc}") from exc
    if not records:
        return _empty_log()
    return TrialLog.from_records(records)
