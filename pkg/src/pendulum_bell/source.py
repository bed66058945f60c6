"""The card/object source and the two measurement stations."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from itertools import accumulate

import numpy as np

from .exact import ExactNumber
from .model import (
    CARDS,
    OBJECTS,
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
    card_label,
    default_decisions,
    object_label,
    validate_model,
    DEFAULT_VALUES,
)

OBJECT_SLOT = 0
CARD_SLOT = 1
_WORDS_PER_TRIAL = 4  # one Philox block per trial; slots use the first two words
_MAX_SEED = 2**64


@dataclass(frozen=True)
class SourceModel:
    decks: DeckTable
    objects: ObjectDistribution = field(default_factory=ObjectDistribution)
    decisions: DecisionTable = field(default_factory=default_decisions)
    values: ValueAssignment = DEFAULT_VALUES

    def __post_init__(self) -> None:
        findings = validate_model(self.decks, self.objects, self.decisions)
        if findings:
            raise ModelValidationError(findings)


class RngStream:
    """Stateless uniform variates keyed by ``(seed, trial, slot)``.

    Trial ``n`` owns Philox counter ``n`` under key ``seed``; slot ``k`` is word
    ``k`` of that block.  Any range of trials can therefore be generated
    independently and agree bit for bit with a one-at-a-time evaluation.
    """

    def __init__(self, seed: int) -> None:
        if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < _MAX_SEED:
            raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
        self.seed = int(seed)

    def raw_block(self, start: int, stop: int) -> np.ndarray:
        if start < 0 or stop < start:
            raise ValueError(f"bad trial range [{start}, {stop})")
        bitgen = np.random.Philox(key=self.seed, counter=start)
        return bitgen.random_raw(_WORDS_PER_TRIAL * (stop - start)).reshape(-1, _WORDS_PER_TRIAL)

    def uniforms(self, start: int, stop: int) -> np.ndarray:
        """Array of shape (stop-start, 2): columns are the object and card variates."""
        raw = self.raw_block(start, stop)[:, :2]
        return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform(self, n: int, slot: int) -> float:
        if slot not in (OBJECT_SLOT, CARD_SLOT):
            raise ValueError(f"unknown draw slot {slot}")
        return float(self.uniforms(n, n + 1)[0, slot])


def float_cdf(probs) -> tuple[float, ...]:
    """Cumulative thresholds, summed exactly and rounded once each."""
    return tuple(float(x) for x in accumulate(probs, lambda a, b: a + b))


def _inverse_cdf(cdf: tuple[float, ...], u: float) -> int:
    # first index whose threshold exceeds u; zero-probability cells are skipped
    return min(bisect.bisect_right(cdf, u), len(cdf) - 1)


def draw_object(objects: ObjectDistribution, u: float) -> ObjectKind:
    """Inverse-CDF draw in canonical object order from one variate ``u`` in [0, 1)."""
    return OBJECTS[_inverse_cdf(float_cdf(objects.probs), u)]


def draw_card(deck: DeckDistribution, u: float) -> Card:
    return CARDS[_inverse_cdf(float_cdf(deck.probs), u)]


def select_deck(decisions: DecisionTable, adam_side: Side, eve_side: Side, obj: ObjectKind) -> int:
    return decisions.lookup(adam_side, eve_side, obj)


def measure_adam(card: Card, setting: AdamSetting, va: ValueAssignment = DEFAULT_VALUES) -> tuple[str, int]:
    label = card_label(card, setting)
    return label, va[label]


def measure_eve(obj: ObjectKind, setting: EveSetting, va: ValueAssignment = DEFAULT_VALUES) -> tuple[str, int]:
    label = object_label(obj, setting)
    return label, va[label]


def cdf_matrix(decks: DeckTable) -> np.ndarray:
    """4x4 float thresholds, one row per deck."""
    return np.array([float_cdf(row.probs) for row in decks.rows], dtype=np.float64)


def inverse_cdf_many(cdf_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Vectorised ``_inverse_cdf``: ``cdf_rows`` is (k, 4) or (4,), ``u`` is (k,)."""
    cdf_rows = np.broadcast_to(cdf_rows, (u.shape[0], cdf_rows.shape[-1]))
    idx = (cdf_rows <= u[:, None]).sum(axis=1)
    return np.minimum(idx, cdf_rows.shape[-1] - 1)


def deck_lookup_array(decisions: DecisionTable) -> np.ndarray:
    """int array indexed ``[adam_is_right, eve_is_right, object_index]`` -> deck number."""
    out = np.zeros((2, 2, 4), dtype=np.int64)
    for (adam, eve, obj), deck in decisions.items():
        out[int(adam is Side.RIGHT), int(eve is Side.RIGHT), obj.index] = deck
    return out
