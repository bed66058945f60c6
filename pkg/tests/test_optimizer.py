import itertools

import numpy as np
import pytest

from oracles import decks_as_floats, float_chsh, float_correlators
from pendulum_bell.analysis import chsh_exact
from pendulum_bell.exact import ExactNumber
from pendulum_bell.model import (
    LABELS,
    OBJECTS,
    DecisionTable,
    ObjectDistribution,
    ValueAssignment,
    default_decisions,
)
from pendulum_bell.optimizer import (
    VERTEX_COUNT,
    local_bound,
    maximize_chsh,
    random_mixture_probe,
    vertex_table,
)
from pendulum_bell.presets import MAXIMAL_DECKS, TSIRELSON_DECKS
from pendulum_bell.source import SourceModel

MAXIMAL_VECTOR = np.array([-1.0, -1.0, -1.0, 1.0])


def test_default_maximum_is_four():
    result = maximize_chsh(default_decisions())
    assert result.best == ExactNumber(4)
    assert result.enumerated == VERTEX_COUNT == 256
    assert chsh_exact(SourceModel(result.witness)).exact == result.best


def test_witness_matches_maximal_preset_up_to_sign():
    result = maximize_chsh(default_decisions())
    witness = float_correlators(decks_as_floats(result.witness))
    assert np.array_equal(witness, MAXIMAL_VECTOR) or np.array_equal(witness, -MAXIMAL_VECTOR)
    np.testing.assert_array_equal(float_correlators(decks_as_floats(MAXIMAL_DECKS)), MAXIMAL_VECTOR)


def test_tie_break_is_lexicographically_smallest():
    result = maximize_chsh(default_decisions())
    optimal = [v for v in itertools.product(range(4), repeat=4) if float_chsh(decks_as_floats(vertex_table(v))) == 4.0]
    assert result.vertex == min(optimal)


def test_reverse_order_float_re_enumeration():
    # independent re-enumeration: float oracle, reversed vertex order
    best = max(float_chsh(decks_as_floats(vertex_table(v))) for v in reversed(list(itertools.product(range(4), repeat=4))))
    assert best == float(maximize_chsh(default_decisions()).best)


def test_constant_deck_table_is_local():
    # a single shared deck is independent of the uniformly drawn object, so
    # every correlator vanishes; the local bound holds with room to spare
    best = maximize_chsh(DecisionTable.constant(1)).best
    assert best == ExactNumber(0)
    assert best <= ExactNumber(2)


def test_object_only_tables_reach_the_local_bound():
    # weight-keyed decks let Adam copy Eve's weight: C(c,w)=C(v,w)=1, C(c,s)=0=C(v,s)
    by_weight = DecisionTable.from_object_map({o: 1 if o.weight.value == "H" else 2 for o in OBJECTS})
    assert maximize_chsh(by_weight).best == ExactNumber(2)


def test_random_settings_independent_tables_obey_local_bound():
    rng = np.random.default_rng(17)
    for _ in range(20):
        table = DecisionTable.from_object_map({o: int(rng.integers(1, 5)) for o in OBJECTS})
        assert table.ignores_sides()
        assert maximize_chsh(table).best <= ExactNumber(2)


def test_maximum_dominates_tsirelson():
    assert maximize_chsh(default_decisions()).best >= chsh_exact(SourceModel(TSIRELSON_DECKS)).exact


def test_local_bound():
    assert local_bound() == ExactNumber(2)
    for flips in itertools.chain.from_iterable(itertools.combinations(LABELS, k) for k in range(len(LABELS) + 1)):
        assert local_bound(ValueAssignment().flipped(flips)) == 2
    all_plus = ValueAssignment.from_mapping({lab: 1 for lab in LABELS})
    assert local_bound(all_plus) == 2


def test_probe_stays_below_vertex_maximum():
    best = maximize_chsh(default_decisions()).best
    probe = random_mixture_probe(default_decisions(), None, None, 10**4, seed=0)
    assert probe <= ExactNumber(4)
    assert probe <= best


def test_probe_is_seeded():
    a = random_mixture_probe(default_decisions(), None, None, 1, seed=5)
    b = random_mixture_probe(default_decisions(), None, None, 1, seed=5)
    assert a == b
    with pytest.raises(ValueError):
        random_mixture_probe(default_decisions(), None, None, 0, seed=5)


def test_nonuniform_objects():
    objects = ObjectDistribution((ExactNumber("1/2"), ExactNumber("1/6"), ExactNumber("1/6"), ExactNumber("1/6")))
    result = maximize_chsh(default_decisions(), objects)
    assert result.best <= ExactNumber(4)
    floats = [float(p) for p in objects.probs]
    expected = max(float_chsh(decks_as_floats(vertex_table(v)), floats) for v in itertools.product(range(4), repeat=4))
    assert float(result.best) == pytest.approx(expected, abs=1e-12)
