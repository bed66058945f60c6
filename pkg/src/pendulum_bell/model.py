"""Cards, objects, settings, value assignments and the source's tables."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .exact import ONE, ZERO, ExactNumber, esum


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class Color(enum.Enum):
    BLACK = "B"
    RED = "R"


class Rank(enum.Enum):
    """Face value of a card."""

    KING = "K"
    QUEEN = "Q"


class Weight(enum.Enum):
    HEAVY = "H"
    LIGHT = "L"


class Shape(enum.Enum):
    SPHERE = "S"
    CUBE = "C"


class Card(enum.Enum):
    BK = (Color.BLACK, Rank.KING)
    BQ = (Color.BLACK, Rank.QUEEN)
    RK = (Color.RED, Rank.KING)
    RQ = (Color.RED, Rank.QUEEN)

    @property
    def color(self) -> Color:
        return self.value[0]

    @property
    def rank(self) -> Rank:
        return self.value[1]

    @property
    def index(self) -> int:
        return CARDS.index(self)


class ObjectKind(enum.Enum):
    HS = (Weight.HEAVY, Shape.SPHERE)
    LS = (Weight.LIGHT, Shape.SPHERE)
    HC = (Weight.HEAVY, Shape.CUBE)
    LC = (Weight.LIGHT, Shape.CUBE)

    @property
    def weight(self) -> Weight:
        return self.value[0]

    @property
    def shape(self) -> Shape:
        return self.value[1]

    @property
    def index(self) -> int:
        return OBJECTS.index(self)


class AdamSetting(enum.Enum):
    COLOR = "color"
    VALUE = "value"


class EveSetting(enum.Enum):
    WEIGHT = "weight"
    SHAPE = "shape"


CARDS: tuple[Card, ...] = (Card.BK, Card.BQ, Card.RK, Card.RQ)
OBJECTS: tuple[ObjectKind, ...] = (ObjectKind.HS, ObjectKind.LS, ObjectKind.HC, ObjectKind.LC)
SIDES: tuple[Side, ...] = (Side.LEFT, Side.RIGHT)
ADAM_SETTINGS: tuple[AdamSetting, ...] = (AdamSetting.COLOR, AdamSetting.VALUE)
EVE_SETTINGS: tuple[EveSetting, ...] = (EveSetting.WEIGHT, EveSetting.SHAPE)
SETTING_PAIRS: tuple[tuple[AdamSetting, EveSetting], ...] = tuple(
    itertools.product(ADAM_SETTINGS, EVE_SETTINGS)
)
DECK_NUMBERS: tuple[int, ...] = (1, 2, 3, 4)
LABELS: tuple[str, ...] = ("B", "K", "H", "S", "R", "Q", "L", "C")

# Left pendulum selects the first setting of each station.
_ADAM_BY_SIDE = {Side.LEFT: AdamSetting.COLOR, Side.RIGHT: AdamSetting.VALUE}
_EVE_BY_SIDE = {Side.LEFT: EveSetting.WEIGHT, Side.RIGHT: EveSetting.SHAPE}


def adam_setting_for(side: Side) -> AdamSetting:
    return _ADAM_BY_SIDE[side]


def eve_setting_for(side: Side) -> EveSetting:
    return _EVE_BY_SIDE[side]


def side_for_adam(setting: AdamSetting) -> Side:
    return Side.LEFT if setting is AdamSetting.COLOR else Side.RIGHT


def side_for_eve(setting: EveSetting) -> Side:
    return Side.LEFT if setting is EveSetting.WEIGHT else Side.RIGHT


@dataclass(frozen=True)
class ValueAssignment:
    """Map from outcome label to +1/-1."""

    signs: tuple[tuple[str, int], ...] = (
        ("B", 1), ("K", 1), ("H", 1), ("S", 1),
        ("R", -1), ("Q", -1), ("L", -1), ("C", -1),
    )

    def __post_init__(self) -> None:
        mapping = dict(self.signs)
        if len(mapping) != len(self.signs):
            raise ValueError("duplicate label in value assignment")
        if set(mapping) != set(LABELS):
            missing = sorted(set(LABELS) - set(mapping))
            extra = sorted(set(mapping) - set(LABELS))
            raise ValueError(f"value assignment labels wrong (missing={missing}, unknown={extra})")
        for label, v in mapping.items():
            if v not in (1, -1) or isinstance(v, bool):
                raise ValueError(f"label {label!r} must map to +1 or -1, got {v!r}")
        # canonical order so equal assignments compare equal
        object.__setattr__(self, "signs", tuple((lab, int(mapping[lab])) for lab in LABELS))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, int]) -> ValueAssignment:
        return cls(tuple(mapping.items()))

    def as_dict(self) -> dict[str, int]:
        return dict(self.signs)

    def __getitem__(self, label: str) -> int:
        for lab, v in self.signs:
            if lab == label:
                return v
        raise KeyError(label)

    def flipped(self, labels: Iterable[str]) -> ValueAssignment:
        flip = set(labels)
        return ValueAssignment(tuple((lab, -v if lab in flip else v) for lab, v in self.signs))


DEFAULT_VALUES = ValueAssignment()


def card_label(card: Card, setting: AdamSetting) -> str:
    return card.color.value if setting is AdamSetting.COLOR else card.rank.value


def object_label(obj: ObjectKind, setting: EveSetting) -> str:
    return obj.weight.value if setting is EveSetting.WEIGHT else obj.shape.value


def card_value(card: Card, setting: AdamSetting, va: ValueAssignment = DEFAULT_VALUES) -> int:
    return va[card_label(card, setting)]


def object_value(obj: ObjectKind, setting: EveSetting, va: ValueAssignment = DEFAULT_VALUES) -> int:
    return va[object_label(obj, setting)]


def _exact_tuple(values: Sequence, what: str) -> tuple[ExactNumber, ...]:
    if len(values) != 4:
        raise ValueError(f"{what} needs exactly 4 entries, got {len(values)}")
    return tuple(ExactNumber.coerce(v) for v in values)


@dataclass(frozen=True)
class DeckDistribution:
    """Card probabilities in canonical order BK, BQ, RK, RQ.

    Construction only checks the shape; use :func:`validate_model` for the
    probability invariants so that every violation can be reported.
    """

    probs: tuple[ExactNumber, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", _exact_tuple(self.probs, "deck"))

    def __getitem__(self, card: Card) -> ExactNumber:
        return self.probs[card.index]

    @classmethod
    def point_mass(cls, card: Card) -> DeckDistribution:
        return cls(tuple(ONE if c is card else ZERO for c in CARDS))


@dataclass(frozen=True)
class DeckTable:
    """Four decks; ``table.deck(1)`` is D1."""

    rows: tuple[DeckDistribution, ...]

    def __post_init__(self) -> None:
        rows = tuple(r if isinstance(r, DeckDistribution) else DeckDistribution(tuple(r)) for r in self.rows)
        if len(rows) != 4:
            raise ValueError(f"deck table needs exactly 4 decks, got {len(rows)}")
        object.__setattr__(self, "rows", rows)

    def deck(self, number: int) -> DeckDistribution:
        if number not in DECK_NUMBERS:
            raise ValueError(f"deck number must be 1..4, got {number}")
        return self.rows[number - 1]

    @classmethod
    def uniform(cls) -> DeckTable:
        q = ExactNumber("1/4")
        return cls(tuple(DeckDistribution((q, q, q, q)) for _ in range(4)))


@dataclass(frozen=True)
class ObjectDistribution:
    """Object probabilities in canonical order HS, LS, HC, LC."""

    probs: tuple[ExactNumber, ...] = field(default_factory=lambda: (ExactNumber("1/4"),) * 4)

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", _exact_tuple(self.probs, "object distribution"))

    def __getitem__(self, obj: ObjectKind) -> ExactNumber:
        return self.probs[obj.index]

    @classmethod
    def point_mass(cls, obj: ObjectKind) -> ObjectDistribution:
        return cls(tuple(ONE if o is obj else ZERO for o in OBJECTS))


DecisionKey = tuple[Side, Side, ObjectKind]
DECISION_KEYS: tuple[DecisionKey, ...] = tuple(itertools.product(SIDES, SIDES, OBJECTS))

_ATTRIBUTE_OBJECTS: dict[str, tuple[ObjectKind, ...]] = {
    "Heavy": (ObjectKind.HS, ObjectKind.HC),
    "Light": (ObjectKind.LS, ObjectKind.LC),
    "Sphere": (ObjectKind.HS, ObjectKind.LS),
    "Cube": (ObjectKind.HC, ObjectKind.LC),
}


def objects_matching(name: str) -> tuple[ObjectKind, ...]:
    """Objects named by an attribute ("Heavy", "Cube", ...) or a code ("HS")."""
    if name in _ATTRIBUTE_OBJECTS:
        return _ATTRIBUTE_OBJECTS[name]
    try:
        return (ObjectKind[name],)
    except KeyError:
        raise ValueError(f"unknown object or attribute {name!r}") from None


@dataclass(frozen=True)
class DecisionTable:
    """Deck number chosen for each (adam side, eve side, object).

    Stored as a tuple of 16 slots in ``DECISION_KEYS`` order; a slot may be
    ``None`` so that incomplete tables can be reported by :func:`validate_model`.
    """

    decks: tuple[int | None, ...]

    def __post_init__(self) -> None:
        if len(self.decks) != len(DECISION_KEYS):
            raise ValueError(f"decision table needs {len(DECISION_KEYS)} slots, got {len(self.decks)}")

    @classmethod
    def from_mapping(cls, mapping: Mapping[DecisionKey, int]) -> DecisionTable:
        return cls(tuple(mapping.get(k) for k in DECISION_KEYS))

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[Side, Side, str, int]]) -> DecisionTable:
        """Build from rows ``(adam_side, eve_side, object_or_attribute, deck)``.

        Conflicting rows raise ``ValueError``; uncovered inputs stay empty.
        """
        mapping: dict[DecisionKey, int] = {}
        for adam, eve, what, deck in rows:
            for obj in objects_matching(what):
                key = (adam, eve, obj)
                if key in mapping and mapping[key] != deck:
                    raise ValueError(
                        f"conflicting decisions for ({adam.value}, {eve.value}, {obj.name}): "
                        f"{mapping[key]} vs {deck}"
                    )
                mapping[key] = deck
        return cls.from_mapping(mapping)

    @classmethod
    def constant(cls, deck: int) -> DecisionTable:
        return cls((deck,) * len(DECISION_KEYS))

    @classmethod
    def from_object_map(cls, by_object: Mapping[ObjectKind, int]) -> DecisionTable:
        """A table that ignores both pendulums."""
        return cls(tuple(by_object[obj] for _, _, obj in DECISION_KEYS))

    def get(self, adam: Side, eve: Side, obj: ObjectKind) -> int | None:
        return self.decks[DECISION_KEYS.index((adam, eve, obj))]

    def lookup(self, adam: Side, eve: Side, obj: ObjectKind) -> int:
        deck = self.get(adam, eve, obj)
        if deck is None:
            raise KeyError(f"no decision for ({adam.value}, {eve.value}, {obj.name})")
        return deck

    def items(self):
        return zip(DECISION_KEYS, self.decks)

    def ignores_sides(self) -> bool:
        return all(
            self.get(a, e, obj) == self.get(Side.LEFT, Side.LEFT, obj)
            for a, e, obj in DECISION_KEYS
        )


DEFAULT_DECISION_ROWS: tuple[tuple[Side, Side, str, int], ...] = (
    (Side.LEFT, Side.LEFT, "Heavy", 1),
    (Side.LEFT, Side.LEFT, "Light", 2),
    (Side.LEFT, Side.RIGHT, "Sphere", 1),
    (Side.LEFT, Side.RIGHT, "Cube", 2),
    (Side.RIGHT, Side.LEFT, "Heavy", 3),
    (Side.RIGHT, Side.LEFT, "Light", 4),
    (Side.RIGHT, Side.RIGHT, "Sphere", 4),
    (Side.RIGHT, Side.RIGHT, "Cube", 3),
)


def default_decisions() -> DecisionTable:
    return DecisionTable.from_rows(DEFAULT_DECISION_ROWS)


@dataclass(frozen=True)
class Finding:
    rule: str
    location: str
    message: str

    def to_json(self) -> dict[str, str]:
        return {"rule": self.rule, "location": self.location, "message": self.message}


def _check_distribution(probs: Sequence[ExactNumber], names: Sequence[str], where: str) -> list[Finding]:
    out = []
    for name, p in zip(names, probs):
        if p.sign() < 0:
            out.append(Finding("negative-entry", f"{where}.{name}", f"{where} entry {name} is negative ({p})"))
    total = esum(probs)
    if total != ONE:
        out.append(Finding("row-sum", where, f"{where} sums to {total} ({float(total):.12g}), not 1"))
    return out


def validate_model(decks: DeckTable, objects: ObjectDistribution, decisions: DecisionTable) -> list[Finding]:
    """All invariant violations of a source model; empty means valid."""
    findings: list[Finding] = []
    card_names = [c.name for c in CARDS]
    for number, row in zip(DECK_NUMBERS, decks.rows):
        findings += _check_distribution(row.probs, card_names, f"D{number}")
    findings += _check_distribution(objects.probs, [o.name for o in OBJECTS], "objects")
    for (adam, eve, obj), deck in decisions.items():
        where = f"decisions[{adam.value},{eve.value},{obj.name}]"
        if deck is None:
            findings.append(Finding("decision-missing", where, f"no deck chosen for {where}"))
        elif deck not in DECK_NUMBERS:
            findings.append(Finding("decision-deck-range", where, f"deck {deck!r} is not one of 1..4"))
    return findings


class ModelValidationError(ValueError):
    """A model failed validation; ``findings`` lists every violation."""

    def __init__(self, findings: Sequence[Finding]) -> None:
        self.findings = list(findings)
        super().__init__("; ".join(f.message for f in self.findings))
