"""
Groebner bases over QQ for the lex order A > B > F > X > Y > Z > M > o.

:func:`buchberger` follows the improved Buchberger algorithm (normal
selection strategy, Gebauer-Moeller pair criteria). Every pair set is
processed in sorted order with ties broken by generation index, and the
result is the reduced monic basis sorted by ascending leading monomial, so it
is unique for the ideal.

Level bases are cached on disk, one file per level:

    vse-gb v1 order=lex vars=A,B,F,X,Y,Z,M,o level=<k|inf> count=<N> [provisional=yes]
    <one canonical polynomial per line>
"""

import os
import tempfile
import time
from typing import Optional, Sequence, Union

from loguru import logger

from pyvse import __version__
from pyvse.config import Settings
from pyvse.errors import BasisCacheError, GroebnerTimeout, PolynomialSyntaxError
from pyvse.poly import RING, VARIABLES, Polynomial, format, monomial, parse
from pyvse.relations import generate_all_relations
from pyvse.types import (
    GroebnerBasis,
    Level,
    VerificationEntry,
    VerificationReport,
    level_name,
)
from pyvse.utils import _load_file, load_reference_polynomials

CACHE_FORMAT = "vse-gb v1"

# basis sizes reported for levels 1 .. 11 when the ideal was first computed
PUBLISHED_BASIS_SIZES = {
    level: size
    for level, size in enumerate((14, 25, 30, 37, 44, 53, 62, 73, 84, 97, 110), start=1)
}

Basis = Union[GroebnerBasis, Sequence[Polynomial]]


def _polynomials(basis: Basis) -> list[Polynomial]:
    if isinstance(basis, GroebnerBasis):
        return list(basis.polynomials)
    return list(basis)


def reduce(p: Polynomial, basis: Basis) -> Polynomial:
    """Fully reduced remainder of p divided by the basis polynomials."""
    divisors = _polynomials(basis)
    if not p or not divisors:
        return p
    return p.rem(divisors)


def s_polynomial(p: Polynomial, q: Polynomial) -> Polynomial:
    if not p or not q:
        raise ValueError("The S-polynomial of a zero polynomial is undefined")
    lcm = RING.monomial_lcm(p.LM, q.LM)
    left = p.mul_monom(RING.monomial_div(lcm, p.LM)).quo_ground(p.LC)
    right = q.mul_monom(RING.monomial_div(lcm, q.LM)).quo_ground(q.LC)
    return left - right


def _key(p: Polynomial) -> tuple:
    return tuple(sorted(p.items()))


def interreduce(polynomials: Sequence[Polynomial]) -> list[Polynomial]:
    """Reduce every polynomial by its predecessors until nothing changes."""
    reduced = [p.monic() for p in polynomials if p]
    while True:
        current = reduced
        reduced = []
        for i, p in enumerate(current):
            r = p.rem(current[:i]) if i else p
            if r:
                reduced.append(r.monic())
        if [_key(p) for p in reduced] == [_key(p) for p in current]:
            return reduced


class _Buchberger:
    def __init__(self, time_budget: Optional[float]):
        self.f: list[Polynomial] = []
        self.index: dict = {}
        self.time_budget = time_budget
        self.start = time.perf_counter()

    def add(self, h: Polynomial) -> int:
        key = _key(h)
        if key not in self.index:
            self.index[key] = len(self.f)
            self.f.append(h)
        return self.index[key]

    def lm(self, i: int) -> tuple:
        return self.f[i].LM

    def lcm(self, i: int, j: int) -> tuple:
        return RING.monomial_lcm(self.lm(i), self.lm(j))

    def coprime(self, i: int, j: int) -> bool:
        return RING.monomial_mul(self.lm(i), self.lm(j)) == self.lcm(i, j)

    def update(self, G: set, pairs: set, ih: int) -> tuple[set, set]:
        mh = self.lm(ih)

        # new pairs (h, g): chain criterion among themselves
        candidates = sorted(G)
        kept = []
        while candidates:
            ig = candidates.pop()
            lcm_hg = self.lcm(ih, ig)

            def lcm_divides(ip):
                return RING.monomial_div(lcm_hg, self.lcm(ih, ip)) is not None

            if self.coprime(ih, ig) or (
                not any(lcm_divides(ip) for ip in candidates)
                and not any(lcm_divides(pair[1]) for pair in kept)
            ):
                kept.append((ih, ig))
        new_pairs = {(ih, ig) for ih, ig in kept if not self.coprime(ih, ig)}

        # old pairs survive unless h strictly splits their lcm
        old_pairs = set()
        for ig1, ig2 in sorted(pairs):
            lcm12 = self.lcm(ig1, ig2)
            if (
                RING.monomial_div(lcm12, mh) is None
                or RING.monomial_lcm(self.lm(ig1), mh) == lcm12
                or RING.monomial_lcm(self.lm(ig2), mh) == lcm12
            ):
                old_pairs.add((ig1, ig2))

        basis = {ig for ig in G if RING.monomial_div(self.lm(ig), mh) is None}
        basis.add(ih)
        return basis, old_pairs | new_pairs

    def check_time(self, G: set, pairs: set):
        if self.time_budget is None:
            return
        elapsed = time.perf_counter() - self.start
        if elapsed > self.time_budget:
            raise GroebnerTimeout(elapsed, len(G), len(pairs))

    def run(self, generators: Sequence[Polynomial]) -> list[Polynomial]:
        for h in interreduce(generators):
            self.add(h)
        G: set = set()
        pairs: set = set()
        for ih in sorted(range(len(self.f)), key=lambda i: (self.lm(i), i)):
            G, pairs = self.update(G, pairs, ih)

        zero_reductions = 0
        steps = 0
        while pairs:
            self.check_time(G, pairs)
            pair = min(pairs, key=lambda pr: (self.lcm(*pr), pr))
            pairs.remove(pair)
            divisors = [self.f[ig] for ig in sorted(G, key=lambda ig: (self.lm(ig), ig))]
            h = s_polynomial(self.f[pair[0]], self.f[pair[1]]).rem(divisors)
            if h:
                G, pairs = self.update(G, pairs, self.add(h.monic()))
            else:
                zero_reductions += 1
            steps += 1
            if steps % 100 == 0:
                logger.debug(
                    f"Buchberger: {steps} pairs done, basis {len(G)}, {len(pairs)} pending"
                )
        logger.debug(f"Buchberger: {zero_reductions} of {steps} pairs reduced to zero")

        reduced = []
        for ig in sorted(G):
            others = [self.f[j] for j in sorted(G - {ig}, key=lambda j: (self.lm(j), j))]
            h = self.f[ig].rem(others) if others else self.f[ig]
            if h:
                reduced.append(h.monic())
        return sorted(reduced, key=lambda p: p.LM)


def buchberger(
    generators: Sequence[Polynomial],
    level: Level = None,
    time_budget: Optional[float] = None,
) -> GroebnerBasis:
    """Reduced monic Groebner basis of the ideal spanned by the generators."""
    start = time.perf_counter()
    polynomials = _Buchberger(time_budget).run([p for p in generators if p])
    logger.info(
        f"Groebner basis of {len(generators)} generators at level {level_name(level)}: "
        f"{len(polynomials)} polynomials in {time.perf_counter() - start:.2f}s"
    )
    return GroebnerBasis(polynomials=tuple(polynomials), level=level)


def is_groebner(basis: Basis) -> bool:
    polynomials = _polynomials(basis)
    for i, p in enumerate(polynomials):
        for q in polynomials[i + 1 :]:
            if reduce(s_polynomial(p, q), polynomials):
                return False
    return True


def load_reference_basis() -> list[Polynomial]:
    return load_reference_polynomials("basis_inf", "p_")


def verify_against_reference(
    basis: Basis, reference: Sequence[Polynomial]
) -> VerificationReport:
    """
    Mutual membership: every reference polynomial reduces to zero modulo the
    basis, and every basis polynomial reduces to zero when divided by the
    reference list.
    """
    polynomials = _polynomials(basis)
    entries = [
        VerificationEntry(
            name=f"reference_{i}",
            direction="reference in basis ideal",
            ok=not reduce(p, polynomials),
        )
        for i, p in enumerate(reference, start=1)
    ]
    entries.extend(
        VerificationEntry(
            name=f"basis_{i}",
            direction="basis in reference ideal",
            ok=not reduce(p, list(reference)),
        )
        for i, p in enumerate(polynomials, start=1)
    )
    report = VerificationReport(entries=entries)
    for entry in report.failures():
        logger.warning(f"Verification failed: {entry.name} ({entry.direction})")
    return report


def compare_ideals(
    generators: Sequence[Polynomial],
    reference: Sequence[Polynomial],
    time_budget: Optional[float] = None,
) -> VerificationReport:
    """Membership of each side in the ideal of the other, via both bases."""
    generated_basis = buchberger(generators, time_budget=time_budget)
    reference_basis = buchberger(reference, time_budget=time_budget)
    entries = [
        VerificationEntry(
            name=f"reference_{i}",
            direction="reference in generated ideal",
            ok=not reduce(p, generated_basis),
        )
        for i, p in enumerate(reference, start=1)
    ]
    entries.extend(
        VerificationEntry(
            name=f"generated_{i}",
            direction="generated in reference ideal",
            ok=not reduce(p, reference_basis),
        )
        for i, p in enumerate(generators, start=1)
    )
    return VerificationReport(entries=entries)


def cache_path(cache_dir: str, level: Level) -> str:
    return os.path.join(cache_dir, f"basis-{__version__}-{level_name(level)}.gb")


def _header(basis: GroebnerBasis) -> str:
    header = (
        f"{CACHE_FORMAT} order=lex vars={','.join(VARIABLES)} "
        f"level={level_name(basis.level)} count={len(basis)}"
    )
    # bases derived from the transcription keep that mark on disk
    return header + " provisional=yes" if basis.provisional else header


def save_basis(basis: GroebnerBasis, path: str):
    """Write the basis atomically: a temporary file replaces the target."""
    folder = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(folder, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            "w", dir=folder, suffix=".tmp", delete=False, encoding="utf-8"
        ) as handle:
            handle.write(_header(basis) + "\n")
            for p in basis.polynomials:
                handle.write(format(p) + "\n")
        os.replace(handle.name, path)
    except OSError as e:
        raise BasisCacheError(f"Could not write basis cache {path}: {e}") from e
    logger.debug(f"Cached basis of level {level_name(basis.level)} in {path}")


def load_basis(path: str) -> GroebnerBasis:
    try:
        lines = [line for line in _load_file(path) if line.strip()]
    except OSError as e:
        raise BasisCacheError(f"Could not read basis cache {path}: {e}") from e
    if not lines or not lines[0].startswith(CACHE_FORMAT + " "):
        raise BasisCacheError(f"{path} is not a basis cache file")
    fields = dict(
        field.split("=", 1) for field in lines[0][len(CACHE_FORMAT) :].split() if "=" in field
    )
    if fields.get("order") != "lex" or fields.get("vars") != ",".join(VARIABLES):
        raise BasisCacheError(f"{path} was written for another ring: {lines[0]}")
    try:
        level = None if fields["level"] == "inf" else int(fields["level"])
        count = int(fields["count"])
        polynomials = tuple(parse(line) for line in lines[1:])
    except (KeyError, ValueError, PolynomialSyntaxError) as e:
        raise BasisCacheError(f"Corrupt basis cache {path}: {e}") from e
    if len(polynomials) != count:
        raise BasisCacheError(
            f"{path} announces {count} polynomials but holds {len(polynomials)}"
        )
    return GroebnerBasis(
        polynomials=polynomials, level=level, provisional=fields.get("provisional") == "yes"
    )


def provisional_basis(relations: Sequence[Polynomial]) -> GroebnerBasis:
    """
    Interreduced transcription of the published basis, accepted only when
    every generated relation reduces to zero modulo it.
    """
    candidate = sorted(interreduce(load_reference_basis()), key=lambda p: p.LM)
    failed = [i for i, p in enumerate(relations, start=1) if reduce(p, candidate)]
    if failed:
        raise ValueError(
            f"Transcribed basis does not reduce relations {failed}; refusing to use it"
        )
    logger.warning("Using the transcribed basis as a provisional unrestricted basis")
    return GroebnerBasis(polynomials=tuple(candidate), level=None, provisional=True)


_MEMO: dict = {}


def _compute(level: Level, settings: Settings) -> GroebnerBasis:
    if level is None:
        relations = generate_all_relations().polynomials
        try:
            return buchberger(relations, level=None, time_budget=settings.gb_time_budget)
        except GroebnerTimeout as e:
            logger.warning(f"{e}; falling back to the transcribed basis")
            try:
                return provisional_basis(relations)
            except ValueError:
                raise e
    unrestricted = basis_for_level(None, settings)
    cutoff = monomial(M=level + 1)
    basis = buchberger(
        list(unrestricted.polynomials) + [cutoff],
        level=level,
        time_budget=settings.level_time_budget,
    )
    if unrestricted.provisional:
        basis = basis.model_copy(update={"provisional": True})
    return basis


def basis_for_level(level: Level, settings: Optional[Settings] = None) -> GroebnerBasis:
    """
    Reduced basis of the ideal at `level` (the ideal plus M^(level+1)), or of
    the unrestricted ideal for level None. Bases are memoised per process and
    cached on disk, provisional ones with their flag in the header.
    """
    if level is not None and level < 0:
        raise ValueError(f"Level must be non-negative, got {level}")
    settings = settings or Settings.from_env()
    memo_key = (level, settings.cache_dir)
    if memo_key in _MEMO:
        return _MEMO[memo_key]

    path = cache_path(settings.cache_dir, level) if settings.cache_dir else None
    basis = None
    if path and os.path.exists(path):
        try:
            basis = load_basis(path)
            logger.debug(f"Loaded basis of level {level_name(level)} from {path}")
        except BasisCacheError as e:
            logger.warning(f"{e}; recomputing")
    if basis is None:
        basis = _compute(level, settings)
        if path:
            try:
                save_basis(basis, path)
            except BasisCacheError as e:
                logger.warning(f"{e}; continuing with the basis in memory")
    _MEMO[memo_key] = basis
    return basis
