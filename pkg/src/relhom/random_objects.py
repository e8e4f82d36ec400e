"""Seeded generators of random modules, maps, complexes, sequences and fractions."""

from __future__ import annotations

import random
from typing import Sequence

import numpy as np

from .complexes import ChainMap, Complex, HomComplex, Homotopy, cone, direct_sum_complexes
from .modules import ModuleMorphism, ZmModule, cokernel, hom_space, image, solve_left
from .relative import Fraction, SubcatDescriptor, is_x_acyclic
from .cohomology import ModuleSES


def divisors(m: int) -> list[int]:
    return [d for d in range(2, m + 1) if m % d == 0]


def random_module(rng: random.Random, m: int, max_rank: int = 2, min_rank: int = 0, allowed: Sequence[int] | None = None) -> ZmModule:
    choices = list(allowed) if allowed else divisors(m)
    return ZmModule(m, [rng.choice(choices) for _ in range(rng.randint(min_rank, max_rank))])


def random_morphism(rng: random.Random, M: ZmModule, N: ZmModule) -> ModuleMorphism:
    H = hom_space(M, N)
    return H.from_coords([rng.randrange(o) for o in H.orders])


def random_automorphism(rng: random.Random, M: ZmModule, tries: int = 50) -> tuple[ModuleMorphism, ModuleMorphism]:
    """A random automorphism and its inverse (identity if none is found quickly)."""
    for _ in range(tries):
        phi = random_morphism(rng, M, M)
        if phi.is_iso():
            inv = solve_left(phi, ModuleMorphism.identity(M))
            return phi, inv
    return ModuleMorphism.identity(M), ModuleMorphism.identity(M)


def _allowed_orders(X: SubcatDescriptor | None, m: int) -> list[int]:
    if X is None:
        return divisors(m)
    return sorted({d for G in X.generators for d in G.orders})


def random_complex(
    rng: random.Random,
    m: int,
    lo: int,
    hi: int,
    max_rank: int = 2,
    X: SubcatDescriptor | None = None,
) -> Complex:
    """Random complex on ``[lo, hi]``; components in add(X) when X is given.

    Each differential is a random map out of the cokernel of the previous
    one, so ``δ ∘ δ = 0`` by construction.
    """
    allowed = _allowed_orders(X, m)
    comps = {n: random_module(rng, m, max_rank, 0, allowed) for n in range(lo, hi + 1)}
    zero = ZmModule.zero(m)
    diffs: dict[int, ModuleMorphism] = {}
    for n in range(lo, hi):
        prev = diffs.get(n - 1, ModuleMorphism.zero(comps.get(n - 1, zero), comps[n]))
        Q, pr = cokernel(prev)
        diffs[n] = random_morphism(rng, Q, comps[n + 1]) @ pr
    return Complex(m, comps, diffs)


def random_cycle_map(rng: random.Random, X: Complex, Y: Complex, n: int = 0) -> ChainMap:
    """A random chain map ``X -> Y[n]`` (uniform combination of cycle generators)."""
    from .modules import kernel

    H = HomComplex(X, Y)
    Z, incl = kernel(H.complex.d(n))
    coeffs = [rng.randrange(d) for d in Z.orders]
    v = incl.apply(coeffs) if Z.rank else np.zeros(H.layout(n).module.rank, dtype=np.int64)
    return H.chain_map_of(v, n)


def random_homotopy(rng: random.Random, X: Complex, Y: Complex) -> Homotopy:
    comps = {}
    for k in X.degrees():
        if not Y.obj(k - 1).is_zero():
            comps[k] = random_morphism(rng, X.obj(k), Y.obj(k - 1))
    return Homotopy(X, Y, comps)


def random_ses(rng: random.Random, m: int, max_rank: int = 2) -> ModuleSES:
    """A random short exact sequence ``0 -> im(φ) -> B -> coker(φ) -> 0``."""
    B = random_module(rng, m, max_rank, 1)
    A0 = random_module(rng, m, max_rank)
    phi = random_morphism(rng, A0, B)
    _, incl = image(phi)
    _, proj = cokernel(incl)
    return ModuleSES(incl, proj)


def random_split_ses(rng: random.Random, m: int, max_rank: int = 2, allowed=None) -> ModuleSES:
    """``0 -> A -> B -> C -> 0`` split, disguised by a random automorphism of B."""
    A = random_module(rng, m, max_rank, 0, allowed)
    C = random_module(rng, m, max_rank, 0, allowed)
    S = ModuleSES.split(A, C)
    phi, inv = random_automorphism(rng, S.f.target)
    return ModuleSES(phi @ S.f, S.g @ inv)


def random_x_acyclic_ses(rng: random.Random, X: SubcatDescriptor, max_rank: int = 2, tries: int = 10) -> ModuleSES:
    """A random sequence that is 𝒳-acyclic (falls back to disguised split ones)."""
    for _ in range(tries):
        s = random_ses(rng, X.modulus, max_rank)
        if is_x_acyclic(s.as_complex(), X, [-1, 0, 1]):
            return s
    return random_split_ses(rng, X.modulus, max_rank)


def random_fraction(
    rng: random.Random,
    X: SubcatDescriptor,
    width: int = 2,
    max_rank: int = 2,
) -> tuple[Fraction, Complex, Complex]:
    """``f / s`` with roof ``D ⊕ cone(id_E)`` in add(X) and ``s ≃ [id_D, 0]``.

    ``s = [id_D + (δt + tδ), δt' + t'δ]`` for random ``t, t'``; ``f`` is a
    random chain map from the roof to a random complex ``S``.
    Returns ``(fraction, D, S)``.
    """
    m = X.modulus
    lo = -width
    D = random_complex(rng, m, lo, 0, max_rank, X)
    E = random_complex(rng, m, lo, -1, max_rank, X)
    C = cone(ChainMap.identity(E)).complex
    Y, injs, projs = direct_sum_complexes([D, C], m)
    u = ChainMap.identity(D) + random_homotopy(rng, D, D).boundary()
    h = random_homotopy(rng, C, D).boundary()
    s_comps = {}
    for n in Y.degrees():
        s_comps[n] = u[n] @ projs[0][n] + h[n] @ projs[1][n]
    s = ChainMap(Y, D, s_comps)
    S = random_complex(rng, m, lo, 1, max_rank)
    f = random_cycle_map(rng, Y, S)
    return Fraction(Y, s, f), D, S
