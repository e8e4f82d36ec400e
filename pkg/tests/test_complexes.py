import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import brute
from relhom.complexes import (
    ChainMap,
    Complex,
    HomComplex,
    Homology,
    Homotopy,
    cone,
    direct_sum_complexes,
    hom_k,
    homology,
    is_acyclic,
    is_null_homotopic,
    is_quasi_iso,
    kernel_complex,
    null_homotopy,
    postcompose,
    precompose,
    shift,
    shift_map,
)
from relhom.errors import NotAChainMap, NotAComplex
from relhom.modules import AbGroup, ModuleMorphism, ZmModule
from relhom.random_objects import random_complex, random_cycle_map, random_homotopy

Z2, Z4 = ZmModule(4, [2]), ZmModule(4, [4])


def periodic(lo=-2, hi=0):
    two = ModuleMorphism.scalar(Z4, 2)
    return Complex(4, {k: Z4 for k in range(lo, hi + 1)}, {k: two for k in range(lo, hi)})


def test_dd_zero_enforced():
    one = ModuleMorphism.identity(Z4)
    with pytest.raises(NotAComplex):
        Complex(4, {0: Z4, 1: Z4, 2: Z4}, {0: one, 1: one})


def test_differential_shape_checked():
    with pytest.raises(ValueError):
        Complex(4, {0: Z4, 1: Z2}, {0: ModuleMorphism.identity(Z4)})


def test_accessors():
    C = periodic()
    assert C.support == (-2, 0)
    assert C.obj(5).is_zero() and C.d(5).is_zero()
    assert C.restrict(-1, 0).support == (-1, 0)
    assert Complex.stalk(Z2, 3).support == (3, 3)
    assert Complex.zero(4).is_zero()
    assert C == periodic() and C != periodic(-3, 0)


def test_homology_periodic():
    C = periodic(-3, 0)
    assert homology(C, -2) == AbGroup(())
    assert homology(C, -1) == AbGroup(())
    assert homology(C, 0) == AbGroup((2,))
    assert homology(C, -3) == AbGroup((2,))
    assert is_acyclic(C, [-2, -1])


def test_cone_of_identity_on_z2():
    X = Complex.stalk(Z2)
    C = cone(ChainMap.identity(X)).complex
    assert C.support == (-1, 0)
    assert all(homology(C, n).is_trivial() for n in (-1, 0))


def test_chain_map_validation():
    X = periodic()
    bad = {-2: ModuleMorphism.identity(Z4), -1: ModuleMorphism.zero(Z4, Z4), 0: ModuleMorphism.zero(Z4, Z4)}
    with pytest.raises(NotAChainMap):
        ChainMap(X, X, bad)
    assert ChainMap(X, X, bad, check=False).failures()


def test_chain_map_algebra():
    X = periodic()
    i = ChainMap.identity(X)
    assert (i @ i) == i
    assert (i - i).is_zero()
    assert (i + i) == ChainMap(X, X, {k: ModuleMorphism.scalar(Z4, 2) for k in X.degrees()})
    assert (-i + i).is_zero()


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_cone_identity_contractible(seed):
    rng = random.Random(seed)
    m = rng.choice([4, 8, 9])
    X = random_complex(rng, m, -2, 1, 2)
    C = cone(ChainMap.identity(X)).complex
    h = null_homotopy(ChainMap.identity(C))
    assert h is not None and h.witnesses(ChainMap.identity(C))


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_shift_inverse_and_homology(seed):
    rng = random.Random(seed)
    m = rng.choice([4, 8, 9])
    X = random_complex(rng, m, -2, 1, 2)
    assert shift(shift(X, -1), 1) == X
    assert shift(shift(X, 1), -1) == X
    k = rng.randint(-3, 3)
    S = shift(X, k)
    for n in range(-5, 5):
        assert homology(S, n) == homology(X, n + k)


def test_shift_sign():
    X = periodic(-1, 0)
    S = shift(X, 1)
    assert S.d(-2) == -X.d(-1)
    f = ChainMap.identity(X)
    assert shift_map(f, 1) == ChainMap.identity(S)


def test_cone_inj_proj():
    rng = random.Random(2)
    X = random_complex(rng, 8, -1, 0, 2)
    Y = random_complex(rng, 8, -1, 0, 2)
    f = random_cycle_map(rng, X, Y)
    C = cone(f)
    assert (C.proj @ C.inj).is_zero()
    assert not C.inj.failures() and not C.proj.failures()


def test_quasi_iso():
    X = Complex.stalk(Z4)
    assert is_quasi_iso(ChainMap.identity(X))
    assert not is_quasi_iso(ChainMap.zero(X, X))


def test_direct_sum_complexes():
    X, Y = periodic(), Complex.stalk(Z2)
    S, injs, projs = direct_sum_complexes([X, Y], 4)
    assert (projs[0] @ injs[0]) == ChainMap.identity(X)
    assert (projs[1] @ injs[0]).is_zero()


def test_kernel_complex():
    X = periodic()
    f = ChainMap(X, X, {k: ModuleMorphism.scalar(Z4, 2) for k in X.degrees()})
    K, inc = kernel_complex(f)
    assert (f @ inc).is_zero()
    assert all(K.obj(k).group() == AbGroup((2,)) for k in X.degrees())


def test_homology_class_machinery():
    C = periodic(-3, 0)
    H = Homology(C, 0)
    gens = H.generators()
    assert len(gens) == 1
    assert not H.is_boundary(gens[0])
    assert H.is_boundary(np.array([2]))
    assert H.class_of(H.representative(H.class_of(gens[0]))).tolist() == H.class_of(gens[0]).tolist()


def test_hom_complex_roundtrip():
    rng = random.Random(5)
    for _ in range(20):
        X = random_complex(rng, 4, -1, 1, 2)
        Y = random_complex(rng, 4, -1, 1, 2)
        H = HomComplex(X, Y)
        f = random_cycle_map(rng, X, Y)
        v = H.element_of(f)
        assert H.chain_map_of(v, 0) == f
        assert not H.complex.d(0).apply(v).any()


def test_postcompose_precompose_are_chain_maps():
    rng = random.Random(6)
    for _ in range(10):
        X = random_complex(rng, 4, -1, 0, 2)
        Y = random_complex(rng, 4, -1, 0, 2)
        Z = random_complex(rng, 4, -1, 0, 2)
        g = random_cycle_map(rng, Y, Z)
        assert not postcompose(g, X)[0].failures()
        assert not precompose(g, X)[0].failures()


def test_null_homotopy_random():
    rng = random.Random(7)
    for _ in range(30):
        m = rng.choice([4, 8, 9])
        X = random_complex(rng, m, -2, 0, 2)
        Y = random_complex(rng, m, -2, 0, 2)
        f = random_homotopy(rng, X, Y).boundary()
        h = null_homotopy(f)
        assert h is not None and h.witnesses(f)
        assert is_null_homotopic(f)


def test_homotopy_witnesses():
    X = Complex.stalk(Z4)
    h = Homotopy(X, X, {})
    assert h.witnesses(ChainMap.zero(X, X))
    assert not h.witnesses(ChainMap.identity(X))


def test_contractible_complex_hom_trivial():
    X = cone(ChainMap.identity(periodic(-1, 0))).complex
    Y = random_complex(random.Random(0), 4, -2, 0, 2)
    for n in range(-2, 3):
        assert hom_k(X, Y, n).is_trivial()


@pytest.mark.parametrize("m", [2, 3, 4])
def test_hom_k_brute_force(m):
    """|hom_k(X, Y, n)| = #chain maps X -> Y[n] / #null-homotopic ones (carrier <= 16)."""
    cs = [C for C in brute.complexes(m, 16, lengths=(1, 2))]
    checked = 0
    for X, Y in itertools.product(cs, repeat=2):
        sx = int(np.prod([X.obj(k).size for k in X.degrees()]))
        sy = int(np.prod([Y.obj(k).size for k in Y.degrees()]))
        if sx * sy > 16:
            continue
        for n in (-1, 0, 1):
            maps = brute.chain_maps(X, Y, n)
            nulls = brute.homotopy_boundaries(X, Y, n)
            assert hom_k(X, Y, n).order * len(nulls) == len(maps)
            checked += 1
    assert checked > 0
