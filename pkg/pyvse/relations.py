"""
Relations forced on the state sum by Reidemeister moves 2 and 3.

Each move template is closed by every perfect matching of its boundary
endpoints. The state sums of both closed sides must agree, so their
difference is a relation of the ideal.
"""

from typing import Iterable, Sequence

from loguru import logger

from pyvse.diagram import parse_crossing_line, relabel, validate
from pyvse.errors import BoundaryError
from pyvse.poly import Polynomial, canonical_sign, content_free
from pyvse.statesum import state_sum
from pyvse.types import (
    Crossing,
    ExteriorMatching,
    LinkDiagram,
    MoveTemplate,
    Relation,
    RelationSet,
)
from pyvse.utils import UnionFind, load_reference_polynomials


def _crossings(*lines: str) -> tuple[Crossing, ...]:
    return tuple(parse_crossing_line(line) for line in lines)


MOVE_21 = MoveTemplate(
    name="move21",
    left=_crossings("X1 a b f e", "X2 d e f c"),
    right_arcs=(("a", "d"), ("b", "c")),
    boundary=("a", "b", "c", "d"),
)
MOVE_22 = MoveTemplate(
    name="move22",
    left=_crossings("X2 a b f e", "X1 d e f c"),
    right_arcs=(("a", "d"), ("b", "c")),
    boundary=("a", "b", "c", "d"),
)
MOVE_31 = MoveTemplate(
    name="move31",
    left=_crossings("X1 a b h g", "X2 i e f g", "X2 h c d i"),
    right=_crossings("X1 a i h f", "X1 c g i b", "X2 h g d e"),
    boundary=("a", "b", "c", "d", "e", "f"),
)
MOVE_32 = MoveTemplate(
    name="move32",
    left=_crossings("X2 a b h g", "X1 i e f g", "X1 h c d i"),
    right=_crossings("X2 a i h f", "X2 c g i b", "X1 h g d e"),
    boundary=("a", "b", "c", "d", "e", "f"),
)

# generation order: move-2 templates first
TEMPLATES = (MOVE_21, MOVE_22, MOVE_31, MOVE_32)


def exterior_matchings(boundary: Sequence[str]) -> list[ExteriorMatching]:
    """
    All perfect matchings of the boundary labels.

    The first label is paired with the last label, then with the others in
    boundary order, and the rest is matched recursively, so (a, b, c, d) gives
    {ad,bc}, {ab,cd}, {ac,bd}.
    """
    labels = tuple(boundary)
    if len(labels) % 2:
        raise BoundaryError(f"A boundary of {len(labels)} labels has no perfect matching")
    if len(set(labels)) != len(labels):
        raise BoundaryError(f"Boundary labels must be distinct: {labels}")
    if not labels:
        return [()]
    first, rest = labels[0], labels[1:]
    matchings = []
    for i in [len(rest) - 1] + list(range(len(rest) - 1)):
        partner = rest[i]
        for tail in exterior_matchings(rest[:i] + rest[i + 1 :]):
            matchings.append(((first, partner),) + tail)
    return matchings


def _side_labels(crossings: Iterable[Crossing], arcs: Iterable[tuple]) -> list[str]:
    labels = [label for crossing in crossings for label in crossing.ends]
    labels.extend(label for arc in arcs for label in arc)
    return labels


def check_template(t: MoveTemplate):
    """Both sides must end on exactly the boundary, internal labels twice."""
    boundary = set(t.boundary)
    for side, crossings, arcs in (
        ("left", t.left, t.left_arcs),
        ("right", t.right, t.right_arcs),
    ):
        labels = _side_labels(crossings, arcs)
        ends = {label for label in labels if labels.count(label) == 1}
        wrong = {label for label in labels if labels.count(label) > 2}
        if ends != boundary or wrong:
            raise BoundaryError(
                f"The {side} side of {t.name} ends on {sorted(ends)}, "
                f"expected {sorted(boundary)}"
            )


def close_side(
    crossings: Sequence[Crossing],
    arcs: Sequence[tuple],
    matching: ExteriorMatching,
    name: str = "",
) -> LinkDiagram:
    """
    Close one side of a template with an exterior matching.

    Labels joined by a direct arc or a matching pair are identified; each
    class without any crossing end becomes a free loop.
    """
    classes = UnionFind(_side_labels(crossings, arcs))
    for x, y in (*arcs, *matching):
        classes.merge(x, y)
    crossing_labels = {label for crossing in crossings for label in crossing.ends}
    mapping = {label: classes.find(label) for label in crossing_labels}
    roots = {classes.find(label) for label in list(classes.parents)}
    free_loops = len(roots - set(mapping.values()))

    closed = relabel(LinkDiagram(crossings=tuple(crossings), name=name), mapping)
    closed = LinkDiagram(crossings=closed.crossings, free_loops=free_loops, name=name)
    report = validate(closed)
    if not report.ok:
        raise BoundaryError(f"Closing {name or 'template side'} gave {report}")
    return closed


def _check_matching(t: MoveTemplate, m: ExteriorMatching):
    matched = [label for pair in m for label in pair]
    if sorted(matched) != sorted(t.boundary):
        raise BoundaryError(
            f"Matching {m} does not pair the boundary {t.boundary} of {t.name}"
        )


def move_relation(t: MoveTemplate, m: ExteriorMatching) -> Polynomial:
    """State sum of the closed left side minus the closed right side, content-free."""
    check_template(t)
    _check_matching(t, m)
    left = close_side(t.left, t.left_arcs, m, name=f"{t.name}-left")
    right = close_side(t.right, t.right_arcs, m, name=f"{t.name}-right")
    return content_free(state_sum(left) - state_sum(right))


def _key(p: Polynomial) -> tuple:
    return tuple(sorted(p.items()))


def generate_all_relations(
    up_to_sign: bool = False, templates: Sequence[MoveTemplate] = TEMPLATES
) -> RelationSet:
    """
    Relations of every template under every exterior matching.

    Exact repeats are dropped in generation order. With up_to_sign a relation
    and its negative count as one, keeping the positive leading coefficient.
    """
    relations: list[Relation] = []
    seen = set()
    generated = 0
    for t in templates:
        for m in exterior_matchings(t.boundary):
            p = move_relation(t, m)
            generated += 1
            if up_to_sign:
                p = canonical_sign(p)
            if not p:
                logger.debug(f"{t.name} with {m} gives no relation")
                continue
            key = _key(p)
            if key in seen:
                continue
            seen.add(key)
            relations.append(Relation(polynomial=p, template=t.name, matching=m))
    logger.info(f"Generated {generated} relations, {len(relations)} distinct")
    return RelationSet(relations=relations, generated=generated)


def load_reference_relations() -> list[Polynomial]:
    return load_reference_polynomials("ideal_generators", "pol_")


def load_move2_equations() -> list[Polynomial]:
    return load_reference_polynomials("move2_equations", "eq_")
