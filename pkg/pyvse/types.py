import re
from collections import Counter
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from pyvse.poly import Polynomial

# None stands for the unrestricted level (written "inf" or "full")
Level = Optional[int]

LABEL_PATTERN = re.compile(r"^[A-Za-z0-9_]+$")


def level_name(level: Level) -> str:
    return "inf" if level is None else str(level)


class RecordType(Enum):
    blank = "blank"
    comment = "comment"
    loop = "loop"
    crossing = "crossing"


class CrossingKind(Enum):
    X1 = "X1"
    X2 = "X2"


class Resolution(Enum):
    smooth1 = "smooth1"
    smooth2 = "smooth2"
    virtual = "virtual"

    def pairs(self, ends: tuple) -> tuple[tuple, tuple]:
        a, b, c, d = ends
        if self is Resolution.smooth1:
            return (a, b), (c, d)
        elif self is Resolution.smooth2:
            return (a, d), (b, c)
        return (a, c), (b, d)


SMOOTHINGS = (Resolution.smooth1, Resolution.smooth2)

# ring variable carried by each transition; smoothings also carry one M
WEIGHTS = {
    (CrossingKind.X1, Resolution.smooth1): "A",
    (CrossingKind.X1, Resolution.smooth2): "B",
    (CrossingKind.X1, Resolution.virtual): "F",
    (CrossingKind.X2, Resolution.smooth1): "X",
    (CrossingKind.X2, Resolution.smooth2): "Y",
    (CrossingKind.X2, Resolution.virtual): "Z",
}

State = tuple[Resolution, ...]


class Crossing(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: CrossingKind
    ends: tuple[str, str, str, str]

    @field_validator("ends")
    @classmethod
    def _labels_are_tokens(cls, ends):
        for label in ends:
            if not LABEL_PATTERN.match(label):
                raise ValueError(f"Edge label '{label}' is not a [A-Za-z0-9_]+ token")
        return ends

    def __str__(self):
        return f"{self.kind.value} {' '.join(self.ends)}"


class LinkDiagram(BaseModel):
    model_config = ConfigDict(frozen=True)

    crossings: tuple[Crossing, ...] = ()
    free_loops: int = Field(default=0, ge=0)
    name: str = ""

    @property
    def crossing_count(self) -> int:
        return len(self.crossings)

    def label_counts(self) -> Counter:
        return Counter(label for crossing in self.crossings for label in crossing.ends)

    def labels(self) -> list[str]:
        # first-occurrence order keeps every derived numbering deterministic
        return list(dict.fromkeys(
            label for crossing in self.crossings for label in crossing.ends
        ))

    def __str__(self):
        return f"{self.name or 'link'} ({self.crossing_count} crossings, {self.free_loops} free loops)"


class ValidationReport(BaseModel):
    ok: bool
    offending: dict[str, int] = {}
    crossing_count: int
    free_loops: int

    def __str__(self):
        if self.ok:
            return f"ok: {self.crossing_count} crossings, {self.free_loops} free loops"
        if not self.offending:
            return "invalid: empty diagram"
        details = ", ".join(
            f"{label} occurs {count}x" for label, count in self.offending.items()
        )
        return f"invalid: {details}"


class MoveTemplate(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    left: tuple[Crossing, ...]
    left_arcs: tuple[tuple[str, str], ...] = ()
    right: tuple[Crossing, ...] = ()
    right_arcs: tuple[tuple[str, str], ...] = ()
    boundary: tuple[str, ...]


ExteriorMatching = tuple[tuple[str, str], ...]


class Relation(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    polynomial: Polynomial
    template: str
    matching: ExteriorMatching


class RelationSet(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    relations: list[Relation]
    generated: int = 0

    @property
    def polynomials(self) -> list[Polynomial]:
        return [relation.polynomial for relation in self.relations]

    def __len__(self):
        return len(self.relations)


class GroebnerBasis(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    polynomials: tuple[Polynomial, ...]
    level: Level = None
    # set when the basis was accepted from transcribed data instead of computed
    provisional: bool = False

    def __len__(self):
        return len(self.polynomials)


class VerificationEntry(BaseModel):
    name: str
    direction: str
    ok: bool


class VerificationReport(BaseModel):
    entries: list[VerificationEntry]

    @property
    def ok(self) -> bool:
        return all(entry.ok for entry in self.entries)

    def failures(self) -> list[VerificationEntry]:
        return [entry for entry in self.entries if not entry.ok]


class InvariantResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    link: str
    level: Level
    value: Polynomial
    state_count: int
    seconds: float = 0.0


class Verdict(Enum):
    distinguished = "DISTINGUISHED"
    equal = "EQUAL-at-level"


class Comparison(BaseModel):
    verdict: Verdict
    first: InvariantResult
    second: InvariantResult


class PublishedValue(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    link: str
    level: Level
    value: Polynomial
    suspected_typo: bool = False
    known_difference: bool = False


class PublishedCheck(Enum):
    match = "MATCH"
    # equal modulo the level basis, different as printed
    congruent = "CONGRUENT"
    mismatch = "MISMATCH"
    suspected_typo = "SUSPECTED-TYPO"
    known_difference = "KNOWN-DIFFERENCE"
