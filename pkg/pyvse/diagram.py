import os
import random
import re
from typing import Optional, Union

from loguru import logger

from pyvse.errors import DiagramSyntaxError, InvalidDiagramError
from pyvse.types import (
    LABEL_PATTERN,
    Crossing,
    CrossingKind,
    LinkDiagram,
    RecordType,
    ValidationReport,
)
from pyvse.utils import _load_file, get_record_type

_WORD = re.compile(r"\S+")


def parse_crossing_line(line: str, row: int = 1) -> Crossing:
    # error columns are 1-based and point at the start of the offending word
    words = [(match.group(), match.start() + 1) for match in _WORD.finditer(line)]
    kind, column = words[0]
    if kind not in CrossingKind.__members__:
        raise DiagramSyntaxError(
            f"expected 'X1', 'X2' or 'loop' but found '{kind}'", row, column
        )
    labels = words[1:]
    if len(labels) != 4:
        column = labels[4][1] if len(labels) > 4 else len(line.rstrip()) + 1
        raise DiagramSyntaxError(
            f"a crossing needs exactly 4 edge labels, found {len(labels)}", row, column
        )
    for label, column in labels:
        if not LABEL_PATTERN.match(label):
            raise DiagramSyntaxError(f"invalid edge label '{label}'", row, column)
    return Crossing(kind=CrossingKind(kind), ends=tuple(label for label, _ in labels))


def parse_link(text: Union[str, list[str]], name: str = "") -> LinkDiagram:
    """
    Parse the link file format, one record per line:

        X1 <l1> <l2> <l3> <l4>
        X2 <l1> <l2> <l3> <l4>
        loop
        # comment

    Crossings keep their file order. Label multiplicities are checked by
    validate, not here.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    crossings: list[Crossing] = []
    free_loops = 0
    for row, line in enumerate(lines, start=1):
        # trailing comments are allowed after a record
        content = line.split("#", 1)[0]
        record_type = get_record_type(content)
        if record_type in (RecordType.blank, RecordType.comment):
            continue
        elif record_type == RecordType.loop:
            free_loops += 1
        else:
            crossings.append(parse_crossing_line(content, row))
    logger.debug(f"Parsed {len(crossings)} crossings and {free_loops} loops")
    return LinkDiagram(crossings=tuple(crossings), free_loops=free_loops, name=name)


def parse_link_file(filepath: str) -> LinkDiagram:
    logger.info(f"Processing: {filepath}")
    title = os.path.basename(filepath).rsplit(".", 1)[0]
    return parse_link(_load_file(filepath), name=title)


def format_link(d: LinkDiagram) -> str:
    lines = [str(crossing) for crossing in d.crossings]
    lines.extend(["loop"] * d.free_loops)
    return "\n".join(lines) + "\n"


def validate(d: LinkDiagram) -> ValidationReport:
    counts = d.label_counts()
    offending = {label: count for label, count in counts.items() if count != 2}
    # a diagram needs at least one crossing or one free loop
    empty = d.crossing_count + d.free_loops == 0
    return ValidationReport(
        ok=not offending and not empty,
        offending=offending,
        crossing_count=d.crossing_count,
        free_loops=d.free_loops,
    )


def require_valid(d: LinkDiagram) -> LinkDiagram:
    report = validate(d)
    if not report.ok:
        logger.error(f"Diagram {d.name or '<unnamed>'} is invalid: {report}")
        raise InvalidDiagramError(f"invalid diagram: {report}", report)
    return d


def relabel(d: LinkDiagram, mapping: dict[str, str]) -> LinkDiagram:
    crossings = tuple(
        Crossing(
            kind=crossing.kind,
            ends=tuple(mapping.get(label, label) for label in crossing.ends),
        )
        for crossing in d.crossings
    )
    return LinkDiagram(crossings=crossings, free_loops=d.free_loops, name=d.name)


def disjoint_union(d1: LinkDiagram, d2: LinkDiagram) -> LinkDiagram:
    used = set(d1.labels())
    mapping = {}
    for label in d2.labels():
        candidate = label
        while candidate in used:
            candidate = f"{candidate}_"
        used.add(candidate)
        mapping[label] = candidate
    second = relabel(d2, mapping)
    return LinkDiagram(
        crossings=d1.crossings + second.crossings,
        free_loops=d1.free_loops + d2.free_loops,
        name=f"{d1.name}+{d2.name}" if d1.name or d2.name else "",
    )


def _fresh_label(used: set[str], stem: str) -> str:
    index = 0
    while f"{stem}{index}" in used:
        index += 1
    label = f"{stem}{index}"
    used.add(label)
    return label


def _split_edge(
    crossings: list[list[str]], label: str, used: set[str]
) -> tuple[str, str]:
    """Rename the second occurrence of label; returns (kept, new) end names."""
    occurrences = [
        (i, slot)
        for i, ends in enumerate(crossings)
        for slot, end in enumerate(ends)
        if end == label
    ]
    if len(occurrences) != 2:
        raise InvalidDiagramError(f"edge '{label}' does not occur exactly twice")
    new = _fresh_label(used, f"{label}_r")
    i, slot = occurrences[1]
    crossings[i][slot] = new
    return label, new


def insert_r2(
    d: LinkDiagram,
    first: str,
    second: Optional[str] = None,
    template: str = "21",
) -> LinkDiagram:
    """
    Push edge `first` over edge `second` with a move-2 crossing pair.

    The two edges play the roles con[a d] and con[b c] of the move-2
    templates. With second=None the edge is pushed over itself: it is cut
    into three pieces a..d, d=b, c.. so the middle piece is shared.
    """
    if template not in ("21", "22"):
        raise ValueError(f"Unknown move-2 template '{template}', use '21' or '22'")
    require_valid(d)
    used = set(d.labels())
    crossings = [list(crossing.ends) for crossing in d.crossings]

    a, d_end = _split_edge(crossings, first, used)
    if second is None:
        b, c = d_end, _fresh_label(used, f"{first}_s")
        # move the far end of the edge onto the third piece
        for ends in crossings:
            for slot, end in enumerate(ends):
                if end == d_end:
                    ends[slot] = c
    elif second == first:
        raise ValueError("Use second=None to push an edge over itself")
    else:
        b, c = _split_edge(crossings, second, used)

    f = _fresh_label(used, "r2f")
    e = _fresh_label(used, "r2e")
    kinds = (
        (CrossingKind.X1, CrossingKind.X2)
        if template == "21"
        else (CrossingKind.X2, CrossingKind.X1)
    )
    new_crossings = [
        Crossing(kind=old.kind, ends=tuple(ends))
        for old, ends in zip(d.crossings, crossings)
    ]
    new_crossings.append(Crossing(kind=kinds[0], ends=(a, b, f, e)))
    new_crossings.append(Crossing(kind=kinds[1], ends=(d_end, e, f, c)))
    logger.debug(f"Inserted move-{template} pair on edges {first}, {second or first}")
    return require_valid(
        LinkDiagram(
            crossings=tuple(new_crossings), free_loops=d.free_loops, name=f"{d.name}+r2"
        )
    )


def random_diagram(
    n: int, seed: Optional[int] = None, free_loops: int = 0
) -> LinkDiagram:
    """Crossing ends paired at random; valid whenever n + free_loops > 0."""
    rng = random.Random(seed)
    slots = list(range(4 * n))
    rng.shuffle(slots)
    ends = [""] * (4 * n)
    for index in range(0, 4 * n, 2):
        label = f"e{index // 2}"
        ends[slots[index]] = label
        ends[slots[index + 1]] = label
    crossings = tuple(
        Crossing(
            kind=rng.choice([CrossingKind.X1, CrossingKind.X2]),
            ends=tuple(ends[4 * i : 4 * i + 4]),
        )
        for i in range(n)
    )
    return LinkDiagram(crossings=crossings, free_loops=free_loops, name=f"random{n}")
