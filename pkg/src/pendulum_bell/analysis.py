"""Correlators, the CHSH combination, no-signalling and measurement-dependence checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .exact import ONE, ZERO, ExactNumber, esum
from .model import (
    CARDS,
    DECK_NUMBERS,
    OBJECTS,
    SETTING_PAIRS,
    AdamSetting,
    EveSetting,
    card_value,
    object_value,
    side_for_adam,
    side_for_eve,
)
from .runner import TrialLog
from .source import SourceModel

SettingPair = tuple[AdamSetting, EveSetting]

# C(c,w) + C(c,s) + C(v,w) - C(v,s), in SETTING_PAIRS order
CHSH_SIGNS: tuple[int, ...] = (1, 1, 1, -1)
SIGN_PAIRS: tuple[tuple[int, int], ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))


class UnderSampledError(ValueError):
    """Too few trials with a given setting pair to estimate its correlator."""


def pair_name(pair: SettingPair) -> str:
    return f"({pair[0].value},{pair[1].value})"


@dataclass(frozen=True)
class JointDistribution:
    """P(o_a, o_b | a, b) over the sign pairs ``SIGN_PAIRS``."""

    pair: SettingPair
    cells: tuple[ExactNumber, ...]

    def __getitem__(self, outcome: tuple[int, int]) -> ExactNumber:
        return self.cells[SIGN_PAIRS.index(outcome)]

    def correlator(self) -> ExactNumber:
        return esum(cell * (oa * ob) for (oa, ob), cell in zip(SIGN_PAIRS, self.cells))


def exact_joint(model: SourceModel, pair: SettingPair) -> JointDistribution:
    adam_setting, eve_setting = pair
    adam_side, eve_side = side_for_adam(adam_setting), side_for_eve(eve_setting)
    plus_cards = [c for c in CARDS if card_value(c, adam_setting, model.values) == 1]
    minus_cards = [c for c in CARDS if card_value(c, adam_setting, model.values) == -1]
    # Adam's outcome depends on the card only, so marginalise each deck once
    deck_marginals: dict[int, tuple[ExactNumber, ExactNumber]] = {}
    acc = {k: ZERO for k in SIGN_PAIRS}
    for obj in OBJECTS:
        p_obj = model.objects[obj]
        if not p_obj:
            continue
        ob = object_value(obj, eve_setting, model.values)
        number = model.decisions.lookup(adam_side, eve_side, obj)
        if number not in deck_marginals:
            deck = model.decks.deck(number)
            deck_marginals[number] = (esum(deck[c] for c in plus_cards), esum(deck[c] for c in minus_cards))
        p_plus, p_minus = deck_marginals[number]
        acc[(1, ob)] = acc[(1, ob)] + p_obj * p_plus
        acc[(-1, ob)] = acc[(-1, ob)] + p_obj * p_minus
    return JointDistribution(pair, tuple(acc[k] for k in SIGN_PAIRS))


def exact_correlator(model: SourceModel, pair: SettingPair) -> ExactNumber:
    return exact_joint(model, pair).correlator()


@dataclass(frozen=True)
class CorrelatorReport:
    pair: SettingPair
    exact: ExactNumber | None = None
    estimate: float | None = None
    stderr: float | None = None
    count: int | None = None

    @property
    def value(self) -> float:
        return self.estimate if self.estimate is not None else float(self.exact)

    def to_json(self) -> dict:
        out: dict = {"adam_setting": self.pair[0].value, "eve_setting": self.pair[1].value}
        if self.exact is not None:
            out["exact"] = self.exact.to_json()
            out["float"] = float(self.exact)
        if self.estimate is not None:
            out.update(estimate=self.estimate, stderr=self.stderr, count=self.count)
        return out


@dataclass(frozen=True)
class ChshReport:
    """``E = |C(c,w) + C(c,s) + C(v,w) - C(v,s)|`` from four correlators."""

    correlators: tuple[CorrelatorReport, ...]
    exact: ExactNumber | None = None
    estimate: float | None = None
    uncertainty: float | None = None

    @property
    def value(self) -> float:
        return self.estimate if self.estimate is not None else float(self.exact)

    def correlator(self, pair: SettingPair) -> CorrelatorReport:
        return self.correlators[SETTING_PAIRS.index(pair)]

    def to_json(self) -> dict:
        e: dict = {}
        if self.exact is not None:
            e.update(exact=self.exact.to_json(), float=float(self.exact))
        if self.estimate is not None:
            e.update(estimate=self.estimate, uncertainty=self.uncertainty)
        return {
            "parameter": "Clauser-Horne (CHSH form)",
            "combination": "|C(color,weight) + C(color,shape) + C(value,weight) - C(value,shape)|",
            "correlators": [c.to_json() for c in self.correlators],
            "E": e,
        }


def chsh_exact(model: SourceModel) -> ChshReport:
    reports = tuple(CorrelatorReport(pair, exact=exact_correlator(model, pair)) for pair in SETTING_PAIRS)
    inner = esum(r.exact * s for r, s in zip(reports, CHSH_SIGNS))
    return ChshReport(reports, exact=abs(inner))


def _pair_mask(log: TrialLog, pair: SettingPair) -> np.ndarray:
    want_adam_right = pair[0] is AdamSetting.VALUE
    want_eve_right = pair[1] is EveSetting.SHAPE
    return (log.adam_right == want_adam_right) & (log.eve_right == want_eve_right)


def estimate_correlator(log: TrialLog, pair: SettingPair) -> CorrelatorReport:
    """Sample mean of ``o_a * o_b`` over trials with ``pair``; stderr uses the 1/(n-1) variance."""
    mask = _pair_mask(log, pair)
    count = int(np.count_nonzero(mask))
    if count < 2:
        raise UnderSampledError(f"setting pair {pair_name(pair)} has {count} trial(s); need at least 2")
    products = log.adam_sign[mask].astype(np.int64) * log.eve_sign[mask].astype(np.int64)
    # integer sum: exact, so the result is independent of summation order
    mean = int(products.sum()) / count
    stderr = math.sqrt(max(0.0, 1.0 - mean * mean) / (count - 1))
    return CorrelatorReport(pair, estimate=mean, stderr=stderr, count=count)


def chsh_estimate(log: TrialLog) -> ChshReport:
    reports = tuple(estimate_correlator(log, pair) for pair in SETTING_PAIRS)
    inner = sum(r.estimate * s for r, s in zip(reports, CHSH_SIGNS))
    uncertainty = math.sqrt(sum(r.stderr**2 for r in reports))
    return ChshReport(reports, estimate=abs(inner), uncertainty=uncertainty)


@dataclass(frozen=True)
class NoSignalingReport:
    """Exact P(outcome = +1) for each station under every setting pair.

    ``adam_differences[a]`` is P_adam(+1 | a, weight) - P_adam(+1 | a, shape);
    ``eve_differences[b]`` is P_eve(+1 | color, b) - P_eve(+1 | value, b).
    """

    adam_marginals: dict[SettingPair, ExactNumber]
    eve_marginals: dict[SettingPair, ExactNumber]
    adam_differences: dict[AdamSetting, ExactNumber]
    eve_differences: dict[EveSetting, ExactNumber]

    @property
    def no_signaling(self) -> bool:
        return all(d == ZERO for d in [*self.adam_differences.values(), *self.eve_differences.values()])

    def to_json(self) -> dict:
        def marg(m):
            return [
                {"adam_setting": a.value, "eve_setting": b.value, "p_plus": v.to_json(), "float": float(v)}
                for (a, b), v in m.items()
            ]

        return {
            "no_signaling": self.no_signaling,
            "adam_marginals": marg(self.adam_marginals),
            "eve_marginals": marg(self.eve_marginals),
            "adam_differences": {a.value: d.to_json() for a, d in self.adam_differences.items()},
            "eve_differences": {b.value: d.to_json() for b, d in self.eve_differences.items()},
        }


def no_signaling_report(model: SourceModel) -> NoSignalingReport:
    adam_m: dict[SettingPair, ExactNumber] = {}
    eve_m: dict[SettingPair, ExactNumber] = {}
    for pair in SETTING_PAIRS:
        joint = exact_joint(model, pair)
        adam_m[pair] = joint[(1, 1)] + joint[(1, -1)]
        eve_m[pair] = joint[(1, 1)] + joint[(-1, 1)]
    adam_d = {a: adam_m[(a, EveSetting.WEIGHT)] - adam_m[(a, EveSetting.SHAPE)] for a in AdamSetting}
    eve_d = {b: eve_m[(AdamSetting.COLOR, b)] - eve_m[(AdamSetting.VALUE, b)] for b in EveSetting}
    return NoSignalingReport(adam_m, eve_m, adam_d, eve_d)


def hidden_given_pair(model: SourceModel, pair: SettingPair, full_state: bool = False) -> dict:
    """P(hidden | pair) as a dict; hidden is the deck number, or (deck, card, object)."""
    adam_side, eve_side = side_for_adam(pair[0]), side_for_eve(pair[1])
    out: dict = {}
    for obj in OBJECTS:
        p_obj = model.objects[obj]
        deck = model.decisions.lookup(adam_side, eve_side, obj)
        if not full_state:
            out[deck] = out.get(deck, ZERO) + p_obj
            continue
        row = model.decks.deck(deck)
        for card in CARDS:
            key = (deck, card, obj)
            out[key] = out.get(key, ZERO) + p_obj * row[card]
    return out


def _hidden_states(full_state: bool) -> Iterable:
    if not full_state:
        return DECK_NUMBERS
    return [(d, c, o) for d in DECK_NUMBERS for c in CARDS for o in OBJECTS]


@dataclass(frozen=True)
class MeasurementDependence:
    total_variation: ExactNumber
    mutual_information_bits: float
    full_state: bool = False

    def to_json(self) -> dict:
        return {
            "hidden": "deck,card,object" if self.full_state else "deck",
            "mean_total_variation": {"exact": self.total_variation.to_json(), "float": float(self.total_variation)},
            "mutual_information_bits": self.mutual_information_bits,
        }


def measurement_dependence(model: SourceModel, full_state: bool = False) -> MeasurementDependence:
    """Mean TV distance between P(hidden | pair) and P(hidden), and I(pair; hidden) in bits.

    The four setting pairs are taken as equally likely, as the default clock
    cadence produces them.
    """
    weight = ExactNumber("1/4")
    states = list(_hidden_states(full_state))
    cond = {pair: hidden_given_pair(model, pair, full_state) for pair in SETTING_PAIRS}
    marginal = {h: esum(weight * cond[p].get(h, ZERO) for p in SETTING_PAIRS) for h in states}

    tv = ZERO
    mi = 0.0
    for pair in SETTING_PAIRS:
        dist = esum(abs(cond[pair].get(h, ZERO) - marginal[h]) for h in states) * ExactNumber("1/2")
        tv = tv + weight * dist
        for h in states:
            p = float(cond[pair].get(h, ZERO))
            if p > 0:
                mi += 0.25 * p * math.log2(p / float(marginal[h]))
    return MeasurementDependence(tv, mi, full_state)


def singlet_reference(angle_a: float, angle_b: float) -> float:
    """Spin-singlet correlator -cos(a - b)."""
    return -math.cos(angle_a - angle_b)


def is_probability_vector(cells: Iterable[ExactNumber]) -> bool:
    cells = list(cells)
    return all(c.sign() >= 0 for c in cells) and esum(cells) == ONE
