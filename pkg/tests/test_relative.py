import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relhom.complexes import ChainMap, Complex, cone, null_homotopy
from relhom.errors import (
    InputError,
    ModulusMismatch,
    NoPreimage,
    NotXQuasiIso,
    PdExceedsBudget,
    WindowTooSmall,
)
from relhom.modules import AbGroup, ModuleMorphism, ZmModule
from relhom.random_objects import (
    random_complex,
    random_cycle_map,
    random_fraction,
    random_homotopy,
    random_module,
)
from relhom.relative import (
    AtLeast,
    Fraction,
    ShortExactSequence,
    SubcatDescriptor,
    is_x_acyclic,
    is_x_quasi_iso,
    lift_module_map,
    lift_through,
    proper_resolution,
    reduce_fraction,
    resolve_complex,
    split_x_quasi_iso,
    syzygy,
    verify_reduction,
    x_acyclicity_failures,
    x_pd,
    x_precover,
)

Z2, Z4 = ZmModule(4, [2]), ZmModule(4, [4])
PROJ4, GP4 = SubcatDescriptor.PROJ(4), SubcatDescriptor.GP(4)


def periodic(lo, hi):
    two = ModuleMorphism.scalar(Z4, 2)
    return Complex(4, {k: Z4 for k in range(lo, hi + 1)}, {k: two for k in range(lo, hi)})


def test_descriptors():
    assert [G.orders for G in GP4.generators] == [(4,), (2,)]
    assert PROJ4.contains(ZmModule(4, [4, 4])) and not PROJ4.contains(Z2)
    assert GP4.contains(Z2)
    assert SubcatDescriptor.named("gp", 4) == GP4
    with pytest.raises(InputError):
        SubcatDescriptor.named("FLAT", 4)
    with pytest.raises(InputError):
        SubcatDescriptor(4, ())
    with pytest.raises(ModulusMismatch):
        SubcatDescriptor(4, (ZmModule(8, [8]),))


def test_x_acyclic_periodic_window():
    S = periodic(-2, 0)
    assert not is_x_acyclic(S, PROJ4)
    assert is_x_acyclic(S, PROJ4, [-1])
    assert ("Z4@4", -2) in [(str(G), n) for G, n in x_acyclicity_failures(S, PROJ4)]


def test_zero_to_stalk_not_quasi_iso():
    S = Complex.stalk(Z2)
    assert not is_x_quasi_iso(ChainMap.zero(Complex.zero(4), S), PROJ4)
    assert is_x_quasi_iso(ChainMap.identity(S), PROJ4)


def test_precover_examples():
    pc = x_precover(Z4, PROJ4)
    assert pc.cover == Z4 and pc.map.is_iso() and pc.check()
    pc = x_precover(Z2, PROJ4)
    assert pc.cover == Z4 and pc.map.is_epi() and pc.check()
    pc = x_precover(ZmModule.zero(4), PROJ4)
    assert pc.check()


def test_x_pd():
    assert x_pd(Z2, PROJ4, 8) == AtLeast(8)
    assert x_pd(Z2, GP4, 8) == 0
    assert x_pd(Z4, PROJ4, 3) == 0
    assert str(AtLeast(3)) == "AtLeast(3)"
    assert syzygy(Z2, PROJ4).group() == AbGroup((2,))


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_proper_resolution_properties(seed):
    rng = random.Random(seed)
    m = rng.choice([4, 8, 9])
    X = rng.choice([SubcatDescriptor.PROJ(m), SubcatDescriptor.GP(m)])
    M = random_module(rng, m, 2)
    for truncate in (False, True):
        res = proper_resolution(M, X, 4, truncate=truncate)
        assert all(res.verify().values())


def test_truncated_resolution_lengths():
    # canonical GP precover of Z2 is Z4 + Z2 -> Z2 with kernel Z4 in add(GP): length 1
    r = proper_resolution(Z2, GP4, 5, truncate=True)
    assert r.finite and r.length == 1 and r.complex.obj(-1) == Z4
    assert proper_resolution(Z4, PROJ4, 5, truncate=True).length == 0
    r = proper_resolution(Z2, PROJ4, 5, truncate=True)
    assert not r.finite and r.length == 5


def test_proper_resolution_bad_depth():
    with pytest.raises(InputError):
        proper_resolution(Z2, PROJ4, -1)


def test_lift_through_example():
    # D = (Z4 -x2-> Z4) in degrees -1, 0 mapping onto the stalk Z2 via the truncated resolution
    res = proper_resolution(Z2, PROJ4, 3)
    g = res.aug_map()
    D = periodic(-1, 0)
    alpha = ChainMap(D, Complex.stalk(Z2), {0: ModuleMorphism(Z4, Z2, [[1]])})
    beta = lift_through(g, alpha, PROJ4)
    assert g @ beta == alpha
    assert not beta.failures()


def test_lift_through_no_preimage():
    g = ChainMap(Complex.stalk(Z4), Complex.stalk(Z4), {0: ModuleMorphism.scalar(Z4, 2)})
    alpha = ChainMap.identity(Complex.stalk(Z4))
    with pytest.raises(NoPreimage):
        lift_through(g, alpha)


def test_lift_through_window_too_small():
    # the kernel of Z4 -> Z2 is not acyclic below degree 0
    g = ChainMap(Complex.stalk(Z4), Complex.stalk(Z2), {0: ModuleMorphism(Z4, Z2, [[1]])})
    D = periodic(-1, 0)
    alpha = ChainMap(D, Complex.stalk(Z2), {0: ModuleMorphism(Z4, Z2, [[1]])})
    with pytest.raises(WindowTooSmall):
        lift_through(g, alpha)


def test_lift_module_map():
    src = proper_resolution(Z2, PROJ4, 3)
    tgt = proper_resolution(Z4, PROJ4, 3)
    f = ModuleMorphism(Z2, Z4, [[2]])
    beta = lift_module_map(f, src, tgt)
    assert tgt.aug_map() @ beta == ChainMap(src.complex, Complex.stalk(Z4), {0: f @ src.augmentation})


def test_resolve_stalk_in_subcategory():
    T = Complex.stalk(Z2)
    R = resolve_complex(T, GP4, 2)
    assert all(R.postconditions(GP4).values())
    res = proper_resolution(Z2, GP4, 2, truncate=True)
    assert R.D == res.complex


def test_resolve_complex_errors():
    T = periodic(-3, 0)
    with pytest.raises(WindowTooSmall):
        resolve_complex(T, GP4, 2)
    with pytest.raises(PdExceedsBudget):
        resolve_complex(Complex.stalk(Z2), PROJ4, 3)


def test_resolve_zero_complex():
    R = resolve_complex(Complex.zero(4), GP4, 2)
    assert R.D.is_zero()


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_resolve_complex_random(seed):
    rng = random.Random(seed)
    m = rng.choice([4, 8, 9])
    X = SubcatDescriptor.GP(m)
    width = rng.randint(0, 3)
    T = random_complex(rng, m, -width, 0, 2)
    R = resolve_complex(T, X, width + 2)
    assert all(R.postconditions(X).values())
    assert isinstance(R.sequence(), ShortExactSequence)


def test_resolve_complex_proj_finite_pd():
    rng = random.Random(9)
    X = SubcatDescriptor.PROJ(4)
    T = random_complex(rng, 4, -2, 0, 2, X)
    R = resolve_complex(T, X, 4)
    assert all(R.postconditions(X).values())


def test_split_x_quasi_iso():
    rng = random.Random(3)
    fr, D, _ = random_fraction(rng, GP4)
    g = split_x_quasi_iso(fr.s, GP4)
    assert null_homotopy(fr.s @ g - ChainMap.identity(D)) is not None


def test_split_rejects_non_quasi_iso():
    S = Complex.stalk(Z2)
    with pytest.raises(NotXQuasiIso):
        split_x_quasi_iso(ChainMap.zero(Complex.stalk(Z4), S), GP4)


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_reduce_fraction(seed):
    rng = random.Random(seed)
    m = rng.choice([4, 8, 9])
    X = SubcatDescriptor.GP(m)
    fr, _, _ = random_fraction(rng, X)
    red, g = reduce_fraction(fr, X)
    assert all(verify_reduction(fr, red, g).values())


def test_faithfulness_witness():
    rng = random.Random(11)
    for _ in range(10):
        fr, D, S = random_fraction(rng, GP4)
        fprime = random_homotopy(rng, D, S).boundary()
        red, _ = reduce_fraction(Fraction(fr.roof, fr.s, fprime @ fr.s), GP4)
        assert null_homotopy(red) is not None


def test_fraction_legs_must_share_roof():
    X = Complex.stalk(Z4)
    with pytest.raises(ValueError):
        Fraction(X, ChainMap.identity(X), ChainMap.identity(Complex.stalk(Z2)))


def test_density_witness():
    rng = random.Random(12)
    for _ in range(10):
        T = random_complex(rng, 8, -2, 0, 2)
        X = SubcatDescriptor.GP(8)
        R = resolve_complex(T, X, 4)
        lo, hi = R.window
        assert is_x_quasi_iso(R.alpha, X, range(lo - 1, hi + 1))


def test_ses_hom_exact():
    f = ModuleMorphism(Z2, Z4, [[2]])
    p = ModuleMorphism(Z4, Z2, [[1]])
    A, B, C = Complex.stalk(Z2), Complex.stalk(Z4), Complex.stalk(Z2)
    s = ShortExactSequence(ChainMap(A, B, {0: f}), ChainMap(B, C, {0: p}))
    assert s.verify()
    assert s.hom_exact(PROJ4) and not s.hom_exact(GP4)


def test_cone_of_random_cycle_map_in_subcategory():
    rng = random.Random(4)
    X = random_complex(rng, 9, -1, 0, 2, SubcatDescriptor.GP(9))
    Y = random_complex(rng, 9, -1, 0, 2, SubcatDescriptor.GP(9))
    f = random_cycle_map(rng, X, Y)
    assert SubcatDescriptor.GP(9).contains_complex(cone(f).complex)
