"""Superdeterministic Bell test with pendulum-scheduled settings.

A source that can read both measurement settings one travel time in advance
picks a deck of cards (sent to Adam) depending on those settings and on a
randomly drawn object (sent to Eve).  This package simulates that experiment
and evaluates its correlators exactly in Q[sqrt(2)].
"""

from .analysis import (
    ChshReport,
    CorrelatorReport,
    JointDistribution,
    UnderSampledError,
    chsh_estimate,
    chsh_exact,
    estimate_correlator,
    exact_correlator,
    exact_joint,
    measurement_dependence,
    no_signaling_report,
    singlet_reference,
)
from .config import ConfigError, config_from_dict, dump_config, load_config, preset_config
from .exact import ExactNumber
from .model import (
    AdamSetting,
    Card,
    DecisionTable,
    DeckDistribution,
    DeckTable,
    EveSetting,
    ModelValidationError,
    ObjectDistribution,
    ObjectKind,
    Side,
    ValueAssignment,
    card_value,
    default_decisions,
    object_value,
    validate_model,
)
from .optimizer import OptimizationResult, local_bound, maximize_chsh, random_mixture_probe
from .presets import MAXIMAL_DECKS, PRESETS, TSIRELSON_DECKS
from .runner import ExperimentConfig, TrialLog, TrialRecord, read_jsonl, run_experiment, run_trial, write_jsonl
from .scheduler import ClockConfig, emission_time, pendulum_side, settings_for_trial
from .source import (
    RngStream,
    SourceModel,
    draw_card,
    draw_object,
    measure_adam,
    measure_eve,
    select_deck,
)

__version__ = "0.1.0"
