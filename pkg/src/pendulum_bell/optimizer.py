"""Maximising the CHSH parameter over deck tables.

For fixed decisions, objects and value assignment every correlator is linear
in each deck row, so the signed CHSH sum is a linear function on the product of
four probability simplices.  Its absolute value is convex and therefore
maximised at a vertex, i.e. a table of four point-mass decks.  There are only
4**4 = 256 of those, so they are simply enumerated in exact arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .analysis import chsh_exact
from .exact import ExactNumber
from .model import (
    ADAM_SETTINGS,
    CARDS,
    EVE_SETTINGS,
    OBJECTS,
    DecisionTable,
    DeckDistribution,
    DeckTable,
    ObjectDistribution,
    ValueAssignment,
    card_value,
    object_value,
    validate_model,
    ModelValidationError,
)
from .source import SourceModel

VERTEX_COUNT = len(CARDS) ** 4

VertexAssignment = tuple[int, int, int, int]


@dataclass(frozen=True)
class OptimizationResult:
    best: ExactNumber
    witness: DeckTable
    vertex: VertexAssignment
    enumerated: int


def vertex_table(vertex: VertexAssignment) -> DeckTable:
    """Point-mass decks: deck ``k+1`` holds only card ``CARDS[vertex[k]]``."""
    return DeckTable(tuple(DeckDistribution.point_mass(CARDS[i]) for i in vertex))


def _check_inputs(decisions: DecisionTable, objects: ObjectDistribution) -> None:
    findings = validate_model(DeckTable.uniform(), objects, decisions)
    if findings:
        raise ModelValidationError(findings)


def maximize_chsh(
    decisions: DecisionTable,
    objects: ObjectDistribution | None = None,
    values: ValueAssignment | None = None,
) -> OptimizationResult:
    """Best E over all 256 point-mass deck tables.

    Vertices are visited in lexicographic order of card indices, and only a
    strictly larger E replaces the incumbent, so ties go to the smallest vertex.
    """
    objects = objects or ObjectDistribution()
    values = values or ValueAssignment()
    _check_inputs(decisions, objects)
    best: ExactNumber | None = None
    best_vertex: VertexAssignment | None = None
    count = 0
    for vertex in itertools.product(range(len(CARDS)), repeat=4):
        model = SourceModel(vertex_table(vertex), objects, decisions, values)
        e = chsh_exact(model).exact
        count += 1
        if best is None or e > best:
            best, best_vertex = e, vertex
    return OptimizationResult(best, vertex_table(best_vertex), best_vertex, count)


def local_bound(values: ValueAssignment | None = None) -> ExactNumber:
    """Largest |A_c E_w + A_c E_s + A_v E_w - A_v E_s| over deterministic (card, object) atoms."""
    values = values or ValueAssignment()
    color, value = ADAM_SETTINGS
    weight, shape = EVE_SETTINGS
    best = 0
    for card in CARDS:
        a_c, a_v = card_value(card, color, values), card_value(card, value, values)
        for obj in OBJECTS:
            e_w, e_s = object_value(obj, weight, values), object_value(obj, shape, values)
            best = max(best, abs(a_c * e_w + a_c * e_s + a_v * e_w - a_v * e_s))
    return ExactNumber(best)


def random_deck_table(rng: np.random.Generator, resolution: int = 1 << 16) -> DeckTable:
    """A deck table with every entry strictly positive and exactly rational."""
    weights = rng.integers(1, resolution, size=(4, 4))
    rows = []
    for w in weights.tolist():
        total = sum(w)
        rows.append(DeckDistribution(tuple(ExactNumber(Fraction(x, total)) for x in w)))
    return DeckTable(tuple(rows))


def random_mixture_probe(
    decisions: DecisionTable,
    objects: ObjectDistribution | None,
    values: ValueAssignment | None,
    samples: int,
    seed: int,
) -> ExactNumber:
    """Largest E found over ``samples`` random interior deck tables."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    objects = objects or ObjectDistribution()
    values = values or ValueAssignment()
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(samples):
        e = chsh_exact(SourceModel(random_deck_table(rng), objects, decisions, values)).exact
        if best is None or e > best:
            best = e
    return best
