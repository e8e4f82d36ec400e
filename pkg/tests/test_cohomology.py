import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relhom.cohomology import (
    ModuleSES,
    am_sequence,
    classical_ext,
    complete_resolution,
    ext_table,
    horseshoe,
    les_contravariant,
    les_covariant,
    relative_ext,
    tate_ext_complete,
    tate_ext_cone,
    tate_table,
)
from relhom.errors import InputError, NotXAcyclicInput, PdExceedsBudget, UnsupportedSubcategory, WindowTooSmall
from relhom.modules import AbGroup, ModuleMorphism, ZmModule
from relhom.random_objects import random_module, random_ses, random_split_ses
from relhom.relative import AtLeast, SubcatDescriptor, syzygy, x_pd

Z2, Z4 = ZmModule(4, [2]), ZmModule(4, [4])
PROJ4, GP4 = SubcatDescriptor.PROJ(4), SubcatDescriptor.GP(4)
G2 = AbGroup((2,))


def nonsplit():
    return ModuleSES(ModuleMorphism(Z2, Z4, [[2]]), ModuleMorphism(Z4, Z2, [[1]]))


def test_relative_ext_examples():
    assert [relative_ext(Z2, Z2, n, PROJ4) for n in range(6)] == [G2] * 6
    assert all(relative_ext(Z2, Z4, n, PROJ4).is_trivial() for n in range(1, 6))
    assert relative_ext(Z2, Z4, 0, PROJ4) == G2
    # Z2 is in GP: relative Ext vanishes above 0
    assert all(relative_ext(Z2, Z2, n, GP4).is_trivial() for n in range(1, 4))
    with pytest.raises(InputError):
        relative_ext(Z2, Z2, -1, PROJ4)


def test_ext_table():
    t = ext_table(Z2, Z2, PROJ4, 4)
    assert t.entries == {n: G2 for n in range(5)}
    assert t.to_json() == {"flavor": "PROJ", "entries": {str(n): [2] for n in range(5)}, "depth_used": 6}
    with pytest.raises(WindowTooSmall):
        ext_table(Z2, Z2, PROJ4, 4, depth=5)


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_classical_agreement(seed):
    rng = random.Random(seed)
    m = rng.choice([4, 8, 9, 12])
    M, N = random_module(rng, m, 2), random_module(rng, m, 2)
    n = rng.randint(0, 4)
    assert relative_ext(M, N, n, SubcatDescriptor.PROJ(m)) == classical_ext(M, N, n)


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_dimension_shift(seed):
    rng = random.Random(seed)
    m = rng.choice([4, 8, 9])
    X = rng.choice([SubcatDescriptor.PROJ(m), SubcatDescriptor.GP(m)])
    M, N = random_module(rng, m, 2), random_module(rng, m, 2)
    n = rng.randint(2, 4)
    assert relative_ext(M, N, n, X) == relative_ext(syzygy(M, X), N, n - 1, X)


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_vanishing_above_pd(seed):
    rng = random.Random(seed)
    m = rng.choice([4, 8, 9])
    X = rng.choice([SubcatDescriptor.PROJ(m), SubcatDescriptor.GP(m)])
    M, N = random_module(rng, m, 2), random_module(rng, m, 2)
    d = x_pd(M, X, 5)
    if isinstance(d, AtLeast):
        return
    for n in range(d + 1, d + 4):
        assert relative_ext(M, N, n, X).is_trivial()


@pytest.mark.parametrize("lit,m", [("Z2", 4), ("Z3", 9), ("Z4+Z2", 8), ("Z8", 8), ("Z2+Z3", 6), ("0", 4), ("Z6", 36), ("Z2", 12), ("Z4+Z2+Z3", 24)])
def test_complete_resolution_checks(lit, m):
    M = ZmModule.parse(lit, m)
    tr = complete_resolution(M, window=5)
    assert all(tr.checks.values()), tr.checks


def test_complete_resolution_unsupported():
    with pytest.raises(UnsupportedSubcategory):
        complete_resolution(Z2, GP4)


def test_tate_examples():
    assert tate_ext_complete(Z2, Z2, -1) == G2
    assert tate_ext_complete(Z2, Z4, 2).is_trivial()
    assert tate_ext_complete(Z4, Z2, 1).is_trivial()
    t = tate_table(Z2, Z2, -2, 2)
    assert all(g == G2 for g in t.entries.values())
    with pytest.raises(WindowTooSmall):
        tate_ext_complete(Z2, Z2, 5, window=3)


def test_tate_cone_route():
    for n in range(1, 4):
        assert tate_ext_cone(Z2, Z2, n, GP4, PROJ4) == G2
        assert tate_ext_cone(Z2, Z4, n, GP4, PROJ4).is_trivial()
    with pytest.raises(InputError):
        tate_ext_cone(Z2, Z2, 0, GP4, PROJ4)
    with pytest.raises(PdExceedsBudget):
        tate_ext_cone(Z2, Z2, 1, PROJ4, PROJ4)


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_tate_route_agreement(seed):
    rng = random.Random(seed)
    m = rng.choice([4, 8, 9])
    M, N = random_module(rng, m, 2), random_module(rng, m, 2)
    n = rng.randint(1, 4)
    assert tate_ext_complete(M, N, n) == tate_ext_cone(M, N, n, SubcatDescriptor.GP(m), SubcatDescriptor.PROJ(m))


def test_module_ses():
    s = nonsplit()
    assert s.is_exact() and not s.is_split()
    assert ModuleSES.split(Z2, Z4).is_split()


def test_les_covariant_nonsplit_proj():
    les = les_covariant(Z2, nonsplit(), PROJ4, 2)
    assert les.exact and les.all_checks_pass
    assert all(c.recheck(4) for c in les.certificates)


def test_les_contravariant_nonsplit_proj():
    les = les_contravariant(nonsplit(), Z2, PROJ4, 2)
    assert les.exact and les.all_checks_pass


def test_les_rejects_non_x_acyclic():
    with pytest.raises(NotXAcyclicInput):
        les_covariant(Z2, nonsplit(), GP4, 2)
    bad = ModuleSES(ModuleMorphism(Z2, Z4, [[2]]), ModuleMorphism.zero(Z4, Z2))
    with pytest.raises(NotXAcyclicInput):
        les_contravariant(bad, Z2, PROJ4, 2)


def test_les_collapses_for_subcategory_object():
    # M in add(X): the sequence is 0 -> Hom(M,N) -> Hom(M,N') -> Hom(M,N'') -> 0 (+ zeros)
    les = les_covariant(Z4, nonsplit(), PROJ4, 1)
    assert les.exact
    assert all(T.is_zero() for l, T in zip(les.labels, les.terms) if l.startswith("Ext1"))


@given(st.integers(0, 10_000))
@settings(max_examples=15, deadline=None)
def test_les_random(seed):
    rng = random.Random(seed)
    m = rng.choice([4, 8, 9])
    M = random_module(rng, m, 2)
    if rng.random() < 0.5:
        X, seq = SubcatDescriptor.GP(m), random_split_ses(rng, m)
    else:
        X, seq = SubcatDescriptor.PROJ(m), random_ses(rng, m)
    assert les_covariant(M, seq, X, 2).all_checks_pass
    assert les_contravariant(seq, M, X, 2).all_checks_pass


def test_horseshoe():
    hs = horseshoe(nonsplit(), PROJ4, 3)
    assert len(hs.res) == 3


def test_am_sequence_examples():
    am = am_sequence(Z2, Z2, GP4, PROJ4, 6)
    assert am.ok and am.d == 0
    assert am.sequence.labels[0] == "0"
    am = am_sequence(ZmModule(4, [4, 2]), Z2, GP4, PROJ4, 5)
    assert am.ok


def test_am_sequence_errors():
    with pytest.raises(PdExceedsBudget):
        am_sequence(Z2, Z2, PROJ4, PROJ4, 5)
    with pytest.raises(WindowTooSmall):
        am_sequence(Z2, Z2, GP4, PROJ4, 2)


@given(st.integers(0, 10_000))
@settings(max_examples=10, deadline=None)
def test_am_sequence_random(seed):
    rng = random.Random(seed)
    m = rng.choice([4, 8, 9])
    M, N = random_module(rng, m, 2), random_module(rng, m, 2)
    am = am_sequence(M, N, SubcatDescriptor.GP(m), SubcatDescriptor.PROJ(m), 5)
    assert am.ok, am.checks
