import json
from collections import Counter

import numpy as np
import pytest

from oracles import random_rational_decks
from pendulum_bell.exact import ExactNumber
from pendulum_bell.model import (
    AdamSetting,
    Card,
    DecisionTable,
    EveSetting,
    ObjectDistribution,
    ObjectKind,
    ValueAssignment,
    default_decisions,
)
from pendulum_bell.presets import MAXIMAL_DECKS, TSIRELSON_DECKS
from pendulum_bell.runner import (
    ExperimentConfig,
    TrialLog,
    TrialRecord,
    iter_jsonl_lines,
    read_jsonl,
    run_experiment,
    run_trial,
    simulate_block,
    write_jsonl,
)
from pendulum_bell.scheduler import ClockConfig
from pendulum_bell.source import SourceModel, measure_adam, measure_eve, select_deck


def config(decks=TSIRELSON_DECKS, trials=64, seed=1, **model_kw):
    return ExperimentConfig(model=SourceModel(decks, **model_kw), seed=seed, trial_count=trials)


def test_first_trial_uses_first_decision_rows():
    for seed in range(30):
        rec = run_trial(config(seed=seed), 0)
        assert (rec.adam_setting, rec.eve_setting) == (AdamSetting.COLOR, EveSetting.WEIGHT)
        assert rec.deck == (1 if rec.object.weight.value == "H" else 2)


def test_sphere_under_value_shape_gives_king_plus_plus():
    seen_sphere = False
    for seed in range(40):
        rec = run_trial(config(MAXIMAL_DECKS, seed=seed), 5)
        assert (rec.adam_setting, rec.eve_setting) == (AdamSetting.VALUE, EveSetting.SHAPE)
        if rec.object.shape.value == "S":
            seen_sphere = True
            assert rec.deck == 4
            assert rec.card.rank.value == "K"
            assert rec.adam_outcome[1] == 1 and rec.eve_outcome[1] == 1
    assert seen_sphere


def test_run_trial_deterministic_and_bounded():
    cfg = config()
    assert run_trial(cfg, 7) == run_trial(cfg, 7)
    with pytest.raises(IndexError):
        run_trial(cfg, 64)


def test_empty_and_eight_trials():
    assert len(run_experiment(config(trials=0))) == 0
    log = run_experiment(config(trials=8))
    counts = Counter((r.adam_setting, r.eve_setting) for r in log)
    assert sorted(counts.values()) == [2, 2, 2, 2]


def test_settings_do_not_depend_on_seed():
    a = run_experiment(config(trials=500, seed=1))
    b = run_experiment(config(trials=500, seed=2))
    np.testing.assert_array_equal(a.adam_right, b.adam_right)
    np.testing.assert_array_equal(a.eve_right, b.eve_right)
    assert not np.array_equal(a.obj, b.obj)
    c = run_experiment(config(trials=500, seed=1))
    assert list(a) == list(c)


def _models():
    rng = np.random.default_rng(5)
    yield SourceModel(TSIRELSON_DECKS)
    yield SourceModel(MAXIMAL_DECKS)
    yield SourceModel(random_rational_decks(rng, zero_prob=0.4), ObjectDistribution((ExactNumber("1/8"), 0, ExactNumber("5/8"), ExactNumber("1/4"))))
    yield SourceModel(random_rational_decks(rng), decisions=DecisionTable.constant(3), values=ValueAssignment().flipped("BQS"))


@pytest.mark.parametrize("model", list(_models()))
def test_vectorised_path_matches_step_by_step(model):
    cfg = ExperimentConfig(model=model, clock=ClockConfig(eve_period=1.5, sample_interval=0.3, phase=0.7), seed=99, trial_count=3000)
    log = run_experiment(cfg, workers=1)
    for n in range(cfg.trial_count):
        assert log[n] == run_trial(cfg, n)


def test_records_satisfy_invariants(tsirelson_model):
    cfg = ExperimentConfig(model=tsirelson_model, seed=4, trial_count=2000)
    for rec in run_experiment(cfg):
        assert rec.adam_outcome == measure_adam(rec.card, rec.adam_setting)
        assert rec.eve_outcome == measure_eve(rec.object, rec.eve_setting)
        assert rec.deck == select_deck(default_decisions(), rec.adam_side, rec.eve_side, rec.object)
        assert rec.emission_t == rec.t - 4.0


def test_worker_count_does_not_change_the_log(monkeypatch):
    cfg = config(trials=200_003, seed=77)
    logs = [run_experiment(cfg, workers=w) for w in (1, 2, 8)]
    for other in logs[1:]:
        for name in ("n", "t", "emission_t", "deck", "card", "obj", "adam_sign", "eve_sign", "adam_label", "eve_label"):
            np.testing.assert_array_equal(getattr(logs[0], name), getattr(other, name))
    monkeypatch.setenv("BELL_NUM_WORKERS", "1")
    capped = run_experiment(cfg, workers=8)
    np.testing.assert_array_equal(capped.card, logs[0].card)


def test_jsonl_lines_equal_json_dumps(tmp_path):
    cfg = config(trials=3000, seed=3)
    log = run_experiment(cfg)
    lines = list(iter_jsonl_lines(log))
    for line, rec in zip(lines, log):
        assert line == json.dumps(rec.to_json(), separators=(",", ":"))
    blind_lines = list(iter_jsonl_lines(log, blind=True))
    for line, rec in zip(blind_lines, log):
        obj = json.loads(line)
        assert set(obj) == {"n", "t", "adam_setting", "eve_setting", "adam_outcome", "eve_outcome"}
        assert line == json.dumps(rec.to_json(blind=True), separators=(",", ":"))


def test_jsonl_round_trip_and_replay(tmp_path):
    cfg = config(MAXIMAL_DECKS, trials=1000, seed=8)
    log = run_experiment(cfg)
    path = tmp_path / "log.jsonl"
    write_jsonl(log, path)
    back = read_jsonl(path)
    assert list(back) == list(log)
    for line in path.read_text().splitlines():
        obj = json.loads(line)
        card, item = Card[obj["card"]], ObjectKind[obj["object"]]
        assert list(measure_adam(card, AdamSetting(obj["adam_setting"]))) == obj["adam_outcome"]
        assert list(measure_eve(item, EveSetting(obj["eve_setting"]))) == obj["eve_outcome"]
        assert isinstance(obj["adam_outcome"][1], int)

    write_jsonl(log, tmp_path / "blind.jsonl", blind=True)
    blind = read_jsonl(tmp_path / "blind.jsonl")
    assert blind.blinded
    np.testing.assert_array_equal(blind.adam_sign, log.adam_sign)
    assert list(iter_jsonl_lines(blind)) == (tmp_path / "blind.jsonl").read_text().splitlines()


def test_read_jsonl_reports_bad_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"n":0}\n')
    with pytest.raises(ValueError, match="bad.jsonl:1"):
        read_jsonl(path)


def test_from_records_round_trip():
    log = run_experiment(config(trials=50))
    again = TrialLog.from_records(list(log))
    assert list(again) == list(log)
    assert TrialRecord.from_json(log[3].to_json()) == log[3]


def test_block_bounds():
    with pytest.raises(IndexError):
        simulate_block(config(trials=10), 5, 11)
    with pytest.raises(ValueError):
        ExperimentConfig(model=SourceModel(TSIRELSON_DECKS), trial_count=-1)
