"""
The invariant eta_k(L): the normal form of the level-k state sum modulo the
level-k Groebner basis, plus link comparison and a bracket cross-check.
"""

import re
import time
from collections import Counter
from itertools import product
from typing import Iterable, Optional

from loguru import logger
from sympy.polys.domains import QQ

from pyvse.config import Settings
from pyvse.diagram import require_valid
from pyvse.errors import StateBudgetExceeded
from pyvse.groebner import basis_for_level, reduce
from pyvse.poly import (
    RING,
    VARIABLES,
    Polynomial,
    parse_expression,
    substitute,
    truncate_M,
    variable,
)
from pyvse.statesum import (
    check_state_budget,
    count_loops_traversal,
    count_states,
    parse_level,
    state_sum,
)
from pyvse.types import (
    SMOOTHINGS,
    Comparison,
    InvariantResult,
    Level,
    LinkDiagram,
    PublishedCheck,
    PublishedValue,
    Resolution,
    Verdict,
    level_name,
)
from pyvse.utils import load_reference


def eta(
    d: LinkDiagram, level: Level, settings: Optional[Settings] = None
) -> InvariantResult:
    settings = settings or Settings.from_env()
    require_valid(d)
    states = check_state_budget(d, level, settings)
    start = time.perf_counter()
    total = state_sum(d, level, workers=settings.workers)
    value = reduce(total, basis_for_level(level, settings))
    return InvariantResult(
        link=d.name,
        level=level,
        value=value,
        state_count=states,
        seconds=time.perf_counter() - start,
    )


def eta_levels(
    d: LinkDiagram, levels: Iterable[Level], settings: Optional[Settings] = None
) -> list[InvariantResult]:
    """Invariants at several levels from one enumeration at the highest level."""
    settings = settings or Settings.from_env()
    levels = list(levels)
    if not levels:
        return []
    require_valid(d)
    top = None if None in levels else max(levels)
    check_state_budget(d, top, settings)
    start = time.perf_counter()
    total = state_sum(d, top, workers=settings.workers)
    results = []
    for level in levels:
        truncated = total if level == top else truncate_M(total, level)
        results.append(
            InvariantResult(
                link=d.name,
                level=level,
                value=reduce(truncated, basis_for_level(level, settings)),
                state_count=count_states(d.crossing_count, level),
                seconds=time.perf_counter() - start,
            )
        )
    return results


def compare(
    d1: LinkDiagram, d2: LinkDiagram, level: Level, settings: Optional[Settings] = None
) -> Comparison:
    """DISTINGUISHED when the invariants differ; equal values prove nothing more."""
    settings = settings or Settings.from_env()
    first = eta(d1, level, settings)
    second = eta(d2, level, settings)
    verdict = Verdict.equal if first.value == second.value else Verdict.distinguished
    logger.info(f"{d1.name} vs {d2.name} at level {level_name(level)}: {verdict.value}")
    return Comparison(verdict=verdict, first=first, second=second)


def bracket_specialize(p: Polynomial) -> Polynomial:
    """M = 1, X = A, Y = B, F = Z = 0."""
    return substitute(p, {"M": 1, "X": variable("A"), "Y": variable("B"), "F": 0, "Z": 0})


def kauffman_bracket_oracle(
    d: LinkDiagram, max_crossings: Optional[int] = None
) -> Polynomial:
    """
    Plain 2^n bracket state sum: A for the first smoothing and B for the
    second at every crossing, o per loop. Loops are counted by walking the
    smoothed diagram, independently of the VSE state sum.
    """
    require_valid(d)
    if max_crossings is None:
        max_crossings = Settings.from_env().oracle_max_crossings
    n = d.crossing_count
    if n > max_crossings:
        raise StateBudgetExceeded(2**n, 2**max_crossings)
    a_index, b_index, o_index = (VARIABLES.index(name) for name in ("A", "B", "o"))
    totals: Counter = Counter()
    for choice in product(SMOOTHINGS, repeat=n):
        pairs = [
            pair
            for crossing, resolution in zip(d.crossings, choice)
            for pair in resolution.pairs(crossing.ends)
        ]
        exponents = [0] * len(VARIABLES)
        exponents[a_index] = choice.count(Resolution.smooth1)
        exponents[b_index] = choice.count(Resolution.smooth2)
        exponents[o_index] = count_loops_traversal(pairs) + d.free_loops
        totals[tuple(exponents)] += 1
    return RING.from_dict({key: QQ(value) for key, value in totals.items()})


_PUBLISHED_HEADER = re.compile(
    r"^(?P<link>\S+) eta_(?P<level>\w+)(?P<flags>(?:\s+\[[a-z-]+\])*)$"
)


def load_published_values() -> list[PublishedValue]:
    values = []
    for header, text in load_reference("published_values").items():
        match = _PUBLISHED_HEADER.match(header)
        if match is None:
            raise ValueError(f"Malformed published value header '{header}'")
        values.append(
            PublishedValue(
                link=match.group("link"),
                level=parse_level(match.group("level")),
                value=parse_expression(text),
                suspected_typo="[suspected-typo]" in match.group("flags"),
                known_difference="[differs]" in match.group("flags"),
            )
        )
    return values


def published_value(name: str, level: Level) -> PublishedValue:
    for value in load_published_values():
        if value.link == name and value.level == level:
            return value
    raise KeyError(f"No published value for {name} at level {level_name(level)}")


def check_published(
    d: LinkDiagram,
    name: str,
    level: Level,
    settings: Optional[Settings] = None,
    result: Optional[InvariantResult] = None,
) -> PublishedCheck:
    expected = published_value(name, level)
    if result is None:
        result = eta(d, level, settings)
    if result.value == expected.value:
        return PublishedCheck.match
    if reduce(expected.value, basis_for_level(level, settings)) == result.value:
        logger.info(
            f"{name} eta_{level_name(level)} agrees with the published value modulo the basis"
        )
        return PublishedCheck.congruent
    if expected.suspected_typo:
        logger.warning(
            f"{name} eta_{level_name(level)} differs from a value flagged as a likely misprint"
        )
        return PublishedCheck.suspected_typo
    if expected.known_difference:
        logger.info(f"{name} eta_{level_name(level)} differs from the published value as recorded")
        return PublishedCheck.known_difference
    logger.warning(f"{name} eta_{level_name(level)} differs from the published value")
    return PublishedCheck.mismatch
