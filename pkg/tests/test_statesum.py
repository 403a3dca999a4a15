import pytest

from pyvse.config import Settings
from pyvse.diagram import disjoint_union, parse_link, random_diagram
from pyvse.errors import InvalidDiagramError, StateBudgetExceeded
from pyvse.poly import RING, VARIABLES, format, truncate_M, variable
from pyvse.statesum import (
    check_state_budget,
    count_loops_traversal,
    count_states,
    enumerate_states,
    evaluate_state,
    parse_level,
    state_sum,
    weight_of,
)
from pyvse.types import CrossingKind, LinkDiagram, Resolution

A, B, F, X, Y, Z, M, o = (variable(name) for name in VARIABLES)


def brute_force(d, level=None):
    return sum((evaluate_state(d, s) for s in enumerate_states(d, level)), RING.zero)


def test_check_state_budget(links):
    settings = Settings(cache_dir=None, max_states=801)
    assert check_state_budget(links["js14"], 2, settings) == 801
    with pytest.raises(StateBudgetExceeded) as error:
        check_state_budget(links["js14"], 3, settings)
    assert error.value.requested == 9921
    assert error.value.allowed == 801
    assert "--max-states" in str(error.value)


def test_single_crossing_sums(kink, curl):
    assert format(state_sum(curl)) == "A*M*o + B*M*o + F*o^2"
    assert state_sum(kink) == M * A * o**2 + M * B * o + F * o
    assert format(state_sum(kink, 0)) == "F*o"
    assert state_sum(kink, 1) == state_sum(kink)


def test_loops_only(links):
    assert state_sum(links["unknot"]) == o
    assert state_sum(links["unlink2"], 0) == o**2


def test_kinds_swap_weights():
    mirrored = parse_link("X2 a a b b")
    assert state_sum(mirrored) == M * X * o**2 + M * Y * o + Z * o


def test_invalid_diagram_is_rejected():
    with pytest.raises(InvalidDiagramError):
        state_sum(parse_link("X1 a b c d"))


def test_count_states():
    assert count_states(20, 1) == 41
    assert count_states(20, 2) == 801
    assert count_states(20, 3) == 9921
    assert count_states(20, 4) == 87441
    assert count_states(500, 2) == 500001
    assert count_states(3, None) == 27
    assert count_states(3, 5) == 27
    assert count_states(0, 0) == 1
    with pytest.raises(ValueError):
        count_states(-1, 2)


def test_enumeration_matches_count(micro_corpus):
    diagrams = micro_corpus + [random_diagram(5, seed=seed) for seed in range(3)]
    for d in diagrams:
        for level in (0, 1, 2, 3, None):
            states = list(enumerate_states(d, level))
            assert len(states) == count_states(d.crossing_count, level)
            assert len(set(states)) == len(states)


def test_enumeration_order(kink):
    assert list(enumerate_states(kink)) == [
        (Resolution.virtual,),
        (Resolution.smooth1,),
        (Resolution.smooth2,),
    ]


@pytest.mark.parametrize("seed", range(8))
def test_fast_sum_matches_brute_force(seed):
    d = random_diagram(5, seed=seed, free_loops=seed % 2)
    for level in (0, 1, 2, None):
        assert state_sum(d, level) == brute_force(d, level)


def test_coefficients_count_states(links):
    d = links["hopf_like"]
    for level in (0, 1, None):
        total = state_sum(d, level)
        assert sum(total.coeffs()) == count_states(d.crossing_count, level)


def test_workers_do_not_change_the_sum():
    d = random_diagram(7, seed=4)
    assert state_sum(d, 3, workers=2) == state_sum(d, 3, workers=1)


def test_truncation_consistency():
    d = random_diagram(6, seed=9)
    full = state_sum(d)
    for k in range(4):
        assert state_sum(d, k) == truncate_M(full, k)


def test_crossing_order_does_not_matter():
    d = random_diagram(6, seed=2)
    shuffled = LinkDiagram(crossings=d.crossings[::-1], free_loops=d.free_loops)
    assert state_sum(shuffled, 2) == state_sum(d, 2)


def test_evaluate_state(curl):
    assert evaluate_state(curl, (Resolution.virtual,)) == F * o**2
    assert evaluate_state(curl, (Resolution.smooth2,)) == M * B * o
    with pytest.raises(ValueError):
        evaluate_state(curl, ())


def test_count_loops_traversal():
    assert count_loops_traversal([("a", "b"), ("b", "a")]) == 1
    assert count_loops_traversal([("a", "a"), ("b", "b")]) == 2
    assert count_loops_traversal([("a", "b"), ("c", "d"), ("b", "c"), ("d", "a")]) == 1
    assert count_loops_traversal([]) == 0


def test_weight_of():
    assert weight_of(CrossingKind.X1, Resolution.smooth1) == M * A
    assert weight_of(CrossingKind.X2, Resolution.smooth2) == M * Y
    assert weight_of(CrossingKind.X2, Resolution.virtual) == Z


def test_parse_level():
    assert parse_level("inf") is None
    assert parse_level("full") is None
    assert parse_level(None) is None
    assert parse_level("3") == 3
    assert parse_level(0) == 0
    for text in ("-1", "x", "1.5"):
        with pytest.raises(ValueError):
            parse_level(text)


@pytest.mark.slow
def test_js14_low_levels(links):
    d = links["js14"]
    for level in (1, 2):
        total = state_sum(d, level, workers=2)
        assert sum(total.coeffs()) == count_states(20, level)


def test_extra_loop_multiplies_by_o(micro_corpus):
    loop = parse_link("loop")
    for d in micro_corpus:
        assert state_sum(disjoint_union(d, loop)) == o * state_sum(d)


def test_enumeration_counts_small():
    d = random_diagram(2, seed=0)
    assert len(list(enumerate_states(d))) == 9
    assert len(list(enumerate_states(d, 1))) == 5
    for n in range(7):
        d = random_diagram(n, seed=n)
        for k in range(n + 3):
            assert len(list(enumerate_states(d, k))) == count_states(n, k)


def test_loop_counts_agree(micro_corpus):
    for d in micro_corpus + [random_diagram(4, seed=seed) for seed in range(4)]:
        for s in enumerate_states(d):
            pairs = [
                pair
                for crossing, resolution in zip(d.crossings, s)
                for pair in resolution.pairs(crossing.ends)
            ]
            exponent = evaluate_state(d, s).LM[-1]
            assert exponent == count_loops_traversal(pairs) + d.free_loops


@pytest.mark.slow
def test_enumeration_counts_up_to_twelve():
    for n in range(7, 13):
        d = random_diagram(n, seed=n)
        for k in range(n + 3):
            assert sum(1 for _ in enumerate_states(d, k)) == count_states(n, k)
