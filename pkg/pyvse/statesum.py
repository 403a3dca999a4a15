"""
VSE state sums.

Every crossing is expanded into its three transitions (two smoothings carrying
one M each and the virtual transition), and every state is weighted by
o^(number of closed polygons). At level k only states with at most k
smoothings survive modulo M^(k+1), so the enumeration never generates the
others.

The fast path in :func:`state_sum` starts from the all-virtual state: its
polygons are computed once, and a state smoothing the crossing set S only has
to re-link the arcs of the polygons that pass through S.
"""

import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product, repeat
from math import comb
from typing import Iterable, Iterator, Union

from loguru import logger
from sympy.polys.domains import QQ

from pyvse.config import Settings
from pyvse.diagram import require_valid
from pyvse.errors import StateBudgetExceeded
from pyvse.poly import M_INDEX, O_INDEX, RING, VARIABLES, Polynomial
from pyvse.types import (
    SMOOTHINGS,
    WEIGHTS,
    CrossingKind,
    Level,
    LinkDiagram,
    Resolution,
    State,
    level_name,
)
from pyvse.utils import UnionFind

_VARIABLE_INDEX = {name: index for index, name in enumerate(VARIABLES)}


def parse_level(text: Union[str, int, None]) -> Level:
    if text is None or isinstance(text, int):
        level = text
    elif text.strip().lower() in ("inf", "full", "∞"):
        level = None
    else:
        try:
            level = int(text)
        except ValueError:
            raise ValueError(f"Level must be a non-negative integer or 'inf', got '{text}'")
    if level is not None and level < 0:
        raise ValueError(f"Level must be non-negative, got {level}")
    return level


def count_states(n: int, k: Level) -> int:
    """Number of non-null states: sum over l <= k of C(n, l) 2^l, or 3^n."""
    if n < 0:
        raise ValueError(f"Crossing count must be non-negative, got {n}")
    if k is None or k >= n:
        return 3**n
    return sum(comb(n, smoothed) * 2**smoothed for smoothed in range(k + 1))


def check_state_budget(d: LinkDiagram, level: Level, settings: Settings) -> int:
    states = count_states(d.crossing_count, level)
    if states > settings.max_states:
        logger.error(f"{d.name or 'link'} at level {level_name(level)} needs {states} states")
        raise StateBudgetExceeded(
            states, settings.max_states, hint="choose a smaller --k or raise --max-states"
        )
    return states


def _weight_exponents(d: LinkDiagram, s: State) -> list[int]:
    exponents = [0] * len(VARIABLES)
    for crossing, resolution in zip(d.crossings, s):
        exponents[_VARIABLE_INDEX[WEIGHTS[(crossing.kind, resolution)]]] += 1
        if resolution is not Resolution.virtual:
            exponents[M_INDEX] += 1
    return exponents


def evaluate_state(d: LinkDiagram, s: State) -> Polynomial:
    """Weight monomial of one state times o^(polygons + free loops)."""
    require_valid(d)
    if len(s) != d.crossing_count:
        raise ValueError(
            f"State has {len(s)} resolutions for {d.crossing_count} crossings"
        )
    components = UnionFind(d.labels())
    for crossing, resolution in zip(d.crossings, s):
        for x, y in resolution.pairs(crossing.ends):
            components.merge(x, y)
    exponents = _weight_exponents(d, s)
    exponents[O_INDEX] = components.components + d.free_loops
    return RING.from_dict({tuple(exponents): QQ(1)})


def enumerate_states(d: LinkDiagram, level: Level = None) -> Iterator[State]:
    """
    States with at most `level` smoothings, all 3^n states for level None.

    Order: by number of smoothings, then smoothed positions in
    lexicographic order, then smooth1 before smooth2 per position.
    """
    n = d.crossing_count
    limit = n if level is None else min(level, n)
    for count in range(limit + 1):
        for positions in combinations(range(n), count):
            for choice in product(SMOOTHINGS, repeat=count):
                state = [Resolution.virtual] * n
                for position, resolution in zip(positions, choice):
                    state[position] = resolution
                yield tuple(state)


def count_loops_traversal(pairs: Iterable[tuple]) -> int:
    neighbours: dict = {}
    for x, y in pairs:
        neighbours.setdefault(x, []).append(y)
        neighbours.setdefault(y, []).append(x)
    seen = set()
    loops = 0
    for start in neighbours:
        if start in seen:
            continue
        loops += 1
        stack = [start]
        seen.add(start)
        while stack:
            for other in neighbours[stack.pop()]:
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
    return loops


@dataclass(frozen=True)
class _Contraction:
    n: int
    free_loops: int
    cycles: int
    # per virtual edge 2i / 2i+1 of crossing i: (cycle, position, entry, exit)
    edge_info: tuple
    # per crossing: label pairs of smooth1 and smooth2
    smoothing_pairs: tuple
    smoothing_variables: tuple
    virtual_variables: tuple
    base_exponents: tuple


def _contract(d: LinkDiagram) -> _Contraction:
    index = {label: position for position, label in enumerate(d.labels())}
    ends = [tuple(index[label] for label in crossing.ends) for crossing in d.crossings]

    endpoints = []
    for crossing_ends in ends:
        endpoints.extend(Resolution.virtual.pairs(crossing_ends))
    adjacency: list[list[int]] = [[] for _ in index]
    for edge, (x, y) in enumerate(endpoints):
        adjacency[x].append(edge)
        adjacency[y].append(edge)

    edge_info: list = [None] * len(endpoints)
    cycles = 0
    for start in range(len(endpoints)):
        if edge_info[start] is not None:
            continue
        edge, entry, position = start, endpoints[start][0], 0
        while edge_info[edge] is None:
            x, y = endpoints[edge]
            exit_ = y if x == entry else x
            edge_info[edge] = (cycles, position, entry, exit_)
            position += 1
            first, second = adjacency[exit_]
            edge = second if first == edge else first
            entry = exit_
        cycles += 1

    base = [0] * len(VARIABLES)
    virtual_variables = []
    smoothing_variables = []
    for crossing in d.crossings:
        virtual = _VARIABLE_INDEX[WEIGHTS[(crossing.kind, Resolution.virtual)]]
        base[virtual] += 1
        virtual_variables.append(virtual)
        smoothing_variables.append(
            tuple(
                _VARIABLE_INDEX[WEIGHTS[(crossing.kind, resolution)]]
                for resolution in SMOOTHINGS
            )
        )
    return _Contraction(
        n=d.crossing_count,
        free_loops=d.free_loops,
        cycles=cycles,
        edge_info=tuple(edge_info),
        smoothing_pairs=tuple(
            tuple(resolution.pairs(crossing_ends) for resolution in SMOOTHINGS)
            for crossing_ends in ends
        ),
        smoothing_variables=tuple(smoothing_variables),
        virtual_variables=tuple(virtual_variables),
        base_exponents=tuple(base),
    )


def _find(parent: list[int], node: int) -> int:
    while parent[node] != node:
        parent[node] = parent[parent[node]]
        node = parent[node]
    return node


def _arc_nodes(c: _Contraction, positions: tuple) -> tuple[dict, int, int]:
    """
    Cut the all-virtual polygons at the crossings in `positions`.

    Returns the node of every cut end (ends joined by a remaining arc share a
    node), the node count and the number of polygons that were cut.
    """
    removed: dict = {}
    for i in positions:
        for edge in (2 * i, 2 * i + 1):
            cycle, position, entry, exit_ = c.edge_info[edge]
            removed.setdefault(cycle, []).append((position, entry, exit_))

    arcs = UnionFind()
    for cuts in removed.values():
        cuts.sort()
        for j, (_, entry, exit_) in enumerate(cuts):
            arcs.add(entry)
            arcs.merge(exit_, cuts[(j + 1) % len(cuts)][1])

    roots: dict = {}
    node_of = {}
    for vertex in arcs.parents:
        root = arcs.find(vertex)
        node_of[vertex] = roots.setdefault(root, len(roots))
    return node_of, len(roots), len(removed)


def _sum_chunk(c: _Contraction, count: int, first: int) -> Counter:
    """Sum all states with `count` smoothings whose first smoothed crossing is `first`."""
    totals: Counter = Counter()
    if count == 0:
        position_sets: Iterable[tuple] = [()]
    else:
        position_sets = (
            (first,) + rest for rest in combinations(range(first + 1, c.n), count - 1)
        )
    for positions in position_sets:
        node_of, nodes, cut = _arc_nodes(c, positions)
        base = list(c.base_exponents)
        base[M_INDEX] += count
        for i in positions:
            base[c.virtual_variables[i]] -= 1
        untouched = c.cycles - cut + c.free_loops
        for choice in product((0, 1), repeat=count):
            exponents = base.copy()
            parent = list(range(nodes))
            merges = 0
            for i, resolution in zip(positions, choice):
                exponents[c.smoothing_variables[i][resolution]] += 1
                for x, y in c.smoothing_pairs[i][resolution]:
                    rx = _find(parent, node_of[x])
                    ry = _find(parent, node_of[y])
                    if rx != ry:
                        parent[rx] = ry
                        merges += 1
            exponents[O_INDEX] = untouched + nodes - merges
            totals[tuple(exponents)] += 1
    return totals


def state_sum(d: LinkDiagram, level: Level = None, workers: int = 1) -> Polynomial:
    """
    Sum of evaluate_state over enumerate_states(d, level).

    With workers > 1 the chunks (smoothing count, first smoothed crossing)
    run in a process pool; partial sums are added in chunk order, so the
    result does not depend on the number of workers.
    """
    require_valid(d)
    n = d.crossing_count
    limit = n if level is None else min(level, n)
    contraction = _contract(d)
    chunks = [(0, 0)] + [
        (count, first)
        for count in range(1, limit + 1)
        for first in range(n - count + 1)
    ]
    start = time.perf_counter()
    logger.debug(
        f"Summing {count_states(n, level)} states of {d.name or 'link'} "
        f"in {len(chunks)} chunks with {workers} worker(s)"
    )
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            partials = list(
                executor.map(
                    _sum_chunk,
                    repeat(contraction),
                    [count for count, _ in chunks],
                    [first for _, first in chunks],
                    chunksize=max(1, len(chunks) // (4 * workers)),
                )
            )
    else:
        partials = [_sum_chunk(contraction, count, first) for count, first in chunks]

    totals: Counter = Counter()
    for partial in partials:
        totals.update(partial)
    logger.info(
        f"State sum of {d.name or 'link'} at level "
        f"{'inf' if level is None else level} took {time.perf_counter() - start:.2f}s"
    )
    return RING.from_dict({exponents: QQ(value) for exponents, value in totals.items()})


def weight_of(kind: CrossingKind, resolution: Resolution) -> Polynomial:
    exponents = [0] * len(VARIABLES)
    exponents[_VARIABLE_INDEX[WEIGHTS[(kind, resolution)]]] = 1
    if resolution is not Resolution.virtual:
        exponents[M_INDEX] = 1
    return RING.from_dict({tuple(exponents): QQ(1)})
