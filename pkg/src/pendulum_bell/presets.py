"""Built-in deck tables."""

from __future__ import annotations

from .exact import ExactNumber
from .model import DeckTable

# (1 - sqrt2/2)/4 and (1 + sqrt2/2)/4
LOW = ExactNumber("1/4", "-1/8")
HIGH = ExactNumber("1/4", "1/8")

_HALF = ExactNumber("1/2")
_ZERO = ExactNumber(0)

TSIRELSON_DECKS = DeckTable(
    (
        (LOW, LOW, HIGH, HIGH),
        (HIGH, HIGH, LOW, LOW),
        (LOW, HIGH, LOW, HIGH),
        (HIGH, LOW, HIGH, LOW),
    )
)

MAXIMAL_DECKS = DeckTable(
    (
        (_ZERO, _ZERO, _HALF, _HALF),
        (_HALF, _HALF, _ZERO, _ZERO),
        (_ZERO, _HALF, _ZERO, _HALF),
        (_HALF, _ZERO, _HALF, _ZERO),
    )
)

PRESETS: dict[str, DeckTable] = {
    "paper-2sqrt2": TSIRELSON_DECKS,
    "paper-max4": MAXIMAL_DECKS,
}

# decimals within this distance of LOW/HIGH are snapped when requested
SNAP_TOLERANCE = 1e-12


def preset_decks(name: str) -> DeckTable:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
