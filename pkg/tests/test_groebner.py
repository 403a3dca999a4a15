import os

import pytest
from loguru import logger
from sympy.polys.groebnertools import groebner

from pyvse.config import DEFAULT_GB_TIME_BUDGET, Settings
from pyvse.errors import BasisCacheError, GroebnerTimeout
from pyvse.groebner import (
    PUBLISHED_BASIS_SIZES,
    basis_for_level,
    buchberger,
    cache_path,
    interreduce,
    is_groebner,
    load_basis,
    load_reference_basis,
    provisional_basis,
    reduce,
    s_polynomial,
    save_basis,
    verify_against_reference,
)
from pyvse.poly import RING, VARIABLES, variable
from pyvse.relations import generate_all_relations
from pyvse.types import GroebnerBasis

A, B, F, X, Y, Z, M, o = (variable(name) for name in VARIABLES)


def test_s_polynomial():
    assert s_polynomial(A - B, B - F) == A * F - B**2
    with pytest.raises(ValueError):
        s_polynomial(RING.zero, A)


def test_small_basis():
    basis = buchberger([A - B, B - F])
    assert basis.polynomials == (B - F, A - F)
    assert basis.level is None
    assert not basis.provisional
    assert is_groebner(basis)


@pytest.mark.parametrize(
    "generators",
    [
        [A * B - M, B**2 - o, A * o - 1],
        [X**2 * Y - Z, X * Y**2 - M, M**2 - o],
        [A**2 + B * F, A * B - F**2 * o, B**3 - 2 * o],
    ],
)
def test_agrees_with_sympy(generators):
    expected = sorted(groebner(generators, RING), key=lambda p: p.LM)
    assert list(buchberger(generators).polynomials) == expected


def test_zero_generators_are_ignored():
    assert buchberger([RING.zero, A]).polynomials == (A,)
    assert buchberger([]).polynomials == ()


def test_is_groebner():
    assert not is_groebner([A * B - 1, A**2 - B])
    assert is_groebner(buchberger([A * B - 1, A**2 - B]))


def test_reduce():
    basis = buchberger([A - B, B - F])
    assert reduce(A * B, basis) == F**2
    assert reduce(o, basis) == o
    assert reduce(RING.zero, basis) == RING.zero
    assert reduce(A, []) == A


def test_interreduce():
    reduced = interreduce([2 * A - 2 * B, A - F, RING.zero])
    assert reduced == [A - B, B - F]


def test_time_budget():
    with pytest.raises(GroebnerTimeout) as error:
        buchberger(generate_all_relations().polynomials, time_budget=0.0)
    assert error.value.basis_size > 0


def test_verify_against_reference():
    basis = buchberger([A - B, B - F])
    assert verify_against_reference(basis, [A - B, B - F]).ok

    report = verify_against_reference(basis, [A - B, A])
    assert not report.ok
    assert [entry.name for entry in report.failures()] == [
        "reference_2",
        "basis_1",
        "basis_2",
    ]


def test_cache_round_trip(tmp_path):
    basis = GroebnerBasis(polynomials=(B - F, A - F / 2), level=2)
    path = cache_path(str(tmp_path), 2)
    save_basis(basis, path)
    with open(path, encoding="utf-8") as fin:
        header = fin.readline().strip()
    assert header == "vse-gb v1 order=lex vars=A,B,F,X,Y,Z,M,o level=2 count=2"
    assert load_basis(path) == basis
    assert not [name for name in os.listdir(tmp_path) if name.endswith(".tmp")]


@pytest.mark.parametrize(
    "content",
    [
        "",
        "A - B\n",
        "vse-gb v1 order=grlex vars=A,B,F,X,Y,Z,M,o level=1 count=1\nA\n",
        "vse-gb v1 order=lex vars=A,B level=1 count=1\nA\n",
        "vse-gb v1 order=lex vars=A,B,F,X,Y,Z,M,o level=1 count=2\nA\n",
        "vse-gb v1 order=lex vars=A,B,F,X,Y,Z,M,o level=one count=1\nA\n",
        "vse-gb v1 order=lex vars=A,B,F,X,Y,Z,M,o level=1 count=1\nA + q\n",
    ],
)
def test_corrupt_cache(tmp_path, content):
    path = os.path.join(str(tmp_path), "broken.gb")
    with open(path, "w", encoding="utf-8") as fout:
        fout.write(content)
    with pytest.raises(BasisCacheError):
        load_basis(path)


def test_missing_cache_file(tmp_path):
    with pytest.raises(BasisCacheError):
        load_basis(os.path.join(str(tmp_path), "absent.gb"))


def test_basis_for_level_reads_cache(tmp_path):
    cached = GroebnerBasis(polynomials=(M**4, o - 1), level=3)
    settings = Settings(cache_dir=str(tmp_path))
    save_basis(cached, cache_path(settings.cache_dir, 3))
    assert basis_for_level(3, settings) == cached
    # memoised: the file is not read again
    os.remove(cache_path(settings.cache_dir, 3))
    assert basis_for_level(3, settings) == cached


def test_level_basis_ignores_unrestricted_budget(tmp_path):
    settings = Settings(cache_dir=str(tmp_path), gb_time_budget=0.0)
    seeded = GroebnerBasis(polynomials=(A * M - B,), level=None)
    save_basis(seeded, cache_path(settings.cache_dir, None))
    basis = basis_for_level(1, settings)
    assert basis.level == 1
    assert not basis.provisional
    assert basis.polynomials == (M**2, B * M, B**2, A * M - B)


def test_level_budget_applies_to_level_bases(tmp_path):
    settings = Settings(cache_dir=str(tmp_path), gb_time_budget=None, level_time_budget=0.0)
    seeded = GroebnerBasis(polynomials=(A * M - B,), level=None)
    save_basis(seeded, cache_path(settings.cache_dir, None))
    with pytest.raises(GroebnerTimeout):
        basis_for_level(1, settings)


def test_default_time_budgets():
    settings = Settings(cache_dir=None)
    assert settings.gb_time_budget == DEFAULT_GB_TIME_BUDGET
    assert 0 < settings.gb_time_budget < 60
    assert settings.level_time_budget is None


def test_provisional_flag_is_cached(tmp_path):
    basis = GroebnerBasis(polynomials=(B - F,), level=None, provisional=True)
    path = cache_path(str(tmp_path), None)
    save_basis(basis, path)
    with open(path, encoding="utf-8") as fin:
        assert fin.readline().strip().endswith("count=1 provisional=yes")
    assert load_basis(path).provisional


def test_basis_for_level_rejects_negative(settings):
    with pytest.raises(ValueError):
        basis_for_level(-1, settings)


def test_reference_basis_is_transcribed():
    reference = load_reference_basis()
    assert len(reference) == 15
    assert all(reference)


def test_published_sizes():
    assert PUBLISHED_BASIS_SIZES[1] == 14
    assert PUBLISHED_BASIS_SIZES[11] == 110


@pytest.mark.slow
def test_provisional_basis():
    relations = generate_all_relations().polynomials
    basis = provisional_basis(relations)
    assert basis.provisional
    assert basis.level is None
    assert all(not reduce(p, basis) for p in relations)
    with pytest.raises(ValueError):
        provisional_basis([o])


@pytest.mark.slow
def test_unrestricted_basis_falls_back_to_transcription(tmp_path):
    messages = []
    handler = logger.add(messages.append, level="WARNING", format="{message}")
    try:
        basis = basis_for_level(None, Settings(cache_dir=str(tmp_path), gb_time_budget=0.0))
    finally:
        logger.remove(handler)
    assert basis.provisional
    assert len(basis) == 15
    for p in generate_all_relations().polynomials:
        assert not reduce(p, basis)
    assert reduce(o, basis) == o
    assert any("falling back to the transcribed basis" in message for message in messages)
    assert load_basis(cache_path(str(tmp_path), None)) == basis


@pytest.mark.slow
def test_level_basis_from_provisional(settings):
    assert basis_for_level(None, settings).provisional
    basis = basis_for_level(1, settings)
    assert basis.provisional
    assert is_groebner(basis)


@pytest.mark.unrestricted
def test_unrestricted_basis(tmp_path):
    settings = Settings(cache_dir=str(tmp_path), gb_time_budget=None)
    basis = basis_for_level(None, settings)
    assert not basis.provisional
    assert is_groebner(basis)
    assert verify_against_reference(basis, load_reference_basis()).ok
    for p in generate_all_relations().polynomials:
        assert not reduce(p, basis)
    assert reduce(o, basis) == o
    assert os.path.exists(cache_path(settings.cache_dir, None))


@pytest.mark.slow
@pytest.mark.parametrize("level", [0, 1, 2])
def test_level_bases(settings, level):
    basis = basis_for_level(level, settings)
    assert basis.level == level
    assert not reduce(M ** (level + 1), basis)
    for p in basis_for_level(None, settings).polynomials:
        assert not reduce(p, basis)
    assert basis.provisional == basis_for_level(None, settings).provisional
    assert load_basis(cache_path(settings.cache_dir, level)) == basis


def test_s_polynomial_edge_cases():
    p = A * B - F
    assert not s_polynomial(p, p)
    assert not reduce(s_polynomial(A, B), [A, B])
    assert buchberger([A]).polynomials == (A,)


def test_reduce_is_linear_and_idempotent():
    basis = buchberger([A * B - M, B**2 - o, A * o - 1])
    p = A**2 * B + o**3 - M
    q = B**3 * A - RING(2) / 3 * o
    r = reduce(p, basis)
    assert reduce(r, basis) == r
    assert reduce(3 * p - q / 2, basis) == 3 * r - reduce(q, basis) / 2
    assert verify_against_reference(basis, basis.polynomials).ok


@pytest.mark.slow
def test_unrestricted_normal_forms(settings):
    basis = basis_for_level(None, settings)
    assert not reduce(F * o**3 - Z * o**3 + F * o**2 - Z * o**2 - 2 * F * o + 2 * Z * o, basis)
    assert not verify_against_reference(basis, [o]).ok
    # the normal form does not depend on which basis of the ideal is used
    other = interreduce(load_reference_basis())
    samples = [
        A * B * o**2 + M * Y * Z,
        F**2 * o - X * Y * M**2,
        Z**4 * o**3 - M * X * o + B,
    ]
    for p in samples:
        assert reduce(p, basis) == reduce(p, buchberger(other))
