"""Homological algebra relative to a subcategory 𝒳 = add(generators).

* acyclicity / quasi-isomorphisms relative to 𝒳 (Hom(G, -) tests on generators),
* canonical precovers and proper 𝒳-resolutions, 𝒳-projective dimension,
* the constructive lemmas: lifting through a Hom-exact short exact sequence
  (``lift_through``), resolving a bounded complex by one with components in 𝒳
  (``resolve_complex``), splitting an 𝒳-quasi-isomorphism onto a complex of
  𝒳-objects (``split_x_quasi_iso``) and reducing a right fraction
  (``reduce_fraction``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .complexes import (
    ChainMap,
    Complex,
    HomComplex,
    cone,
    homology,
    is_acyclic,
    kernel_complex,
    null_homotopy,
    postcompose,
    shift,
    shift_map,
)
from .errors import (
    Cancelled,
    InputError,
    ModulusMismatch,
    NoPreimage,
    NotXQuasiIso,
    PdExceedsBudget,
    WindowTooSmall,
)
from .linalg import solve_linear_mod
from .modules import (
    ModuleMorphism,
    ZmModule,
    direct_sum,
    hom_space,
    is_in_add,
    kernel,
    solve_left,
)

CancelCheck = Callable[[], bool] | None


def _check_cancel(cancel: CancelCheck) -> None:
    if cancel is not None and cancel():
        raise Cancelled("operation cancelled")


# ---------------------------------------------------------------- subcategories


@dataclass(frozen=True)
class SubcatDescriptor:
    """The subcategory add(generators) of Mod-Z/m."""

    modulus: int
    generators: tuple[ZmModule, ...]
    name: str = "custom"
    hypotheses_asserted_by_user: bool = False

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise InputError("a subcategory needs at least one generator")
        for G in gens:
            if G.modulus != self.modulus:
                raise ModulusMismatch(f"generator {G} is not over Z/{self.modulus}")
            if G.is_zero():
                raise InputError("generators must be nonzero")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def PROJ(cls, m: int) -> "SubcatDescriptor":
        return cls(m, (ZmModule(m, [m]),), "PROJ")

    @classmethod
    def GP(cls, m: int) -> "SubcatDescriptor":
        divisors = [d for d in range(m, 1, -1) if m % d == 0]
        return cls(m, tuple(ZmModule(m, [d]) for d in divisors), "GP")

    @classmethod
    def named(cls, name: str, m: int) -> "SubcatDescriptor":
        key = name.strip().upper()
        if key == "PROJ":
            return cls.PROJ(m)
        if key == "GP":
            return cls.GP(m)
        raise InputError(f"unknown subcategory {name!r} (expected PROJ, GP or a JSON descriptor)")

    def contains(self, M: ZmModule) -> bool:
        return is_in_add(M, self.generators)

    def contains_complex(self, C: Complex) -> bool:
        return all(self.contains(C.obj(n)) for n in C.degrees())

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class AtLeast:
    """Lower bound answer for an 𝒳-projective dimension."""

    bound: int

    def __str__(self) -> str:
        return f"AtLeast({self.bound})"


# ---------------------------------------------------------------- acyclicity


def hom_from_generator(G: ZmModule, S: Complex) -> Complex:
    return HomComplex(Complex.stalk(G), S).complex


def is_x_acyclic(S: Complex, X: SubcatDescriptor, degrees=None) -> bool:
    """Whether ``Hom(G, S)`` is acyclic for every generator ``G`` (in ``degrees``)."""
    if S.is_zero():
        return True
    lo, hi = S.support
    degs = list(range(lo, hi + 1)) if degrees is None else list(degrees)
    return all(is_acyclic(hom_from_generator(G, S), degs) for G in X.generators)


def x_acyclicity_failures(S: Complex, X: SubcatDescriptor, degrees=None) -> list[tuple[str, int]]:
    if S.is_zero():
        return []
    lo, hi = S.support
    degs = list(range(lo, hi + 1)) if degrees is None else list(degrees)
    out = []
    for G in X.generators:
        H = hom_from_generator(G, S)
        out += [(G.literal(), n) for n in degs if not homology(H, n).is_trivial()]
    return out


def is_x_quasi_iso(f: ChainMap, X: SubcatDescriptor, degrees=None) -> bool:
    return is_x_acyclic(cone(f).complex, X, degrees)


def hom_surjective(G: ZmModule, f: ModuleMorphism) -> bool:
    """Whether ``Hom(G, f): Hom(G, A) -> Hom(G, B)`` is onto."""
    H = hom_space(G, f.target)
    return all(solve_left(f, b) is not None for b in H.basis())


# ---------------------------------------------------------------- precovers / resolutions


@dataclass(frozen=True)
class Precover:
    """Canonical precover ``e: ⊕_G G^{r_G} -> M`` (sum over Hom bases)."""

    module: ZmModule
    cover: ZmModule
    map: ModuleMorphism
    # witnesses[(G literal, j)] = injection G -> cover with e ∘ inj = j-th basis map
    witnesses: tuple[tuple[ZmModule, ModuleMorphism, ModuleMorphism], ...]

    def check(self) -> bool:
        return all(self.map @ inj == b for _, inj, b in self.witnesses)


def x_precover(M: ZmModule, X: SubcatDescriptor) -> Precover:
    if M.modulus != X.modulus:
        raise ModulusMismatch("module and subcategory over different moduli")
    summands, maps = [], []
    for G in X.generators:
        for b in hom_space(G, M).basis():
            summands.append(G)
            maps.append(b)
    B = direct_sum(summands, M.modulus)
    e = B.map_out(maps) if maps else ModuleMorphism.zero(B.module, M)
    wit = tuple((G, inj, b) for G, inj, b in zip(summands, B.injections, maps))
    return Precover(M, B.module, e, wit)


@dataclass
class ProperResolution:
    """``... -> X^{-1} -> X^0 -(aug)-> M`` with components in 𝒳, degrees ``[-length, 0]``."""

    module: ZmModule
    subcat: SubcatDescriptor
    complex: Complex
    augmentation: ModuleMorphism
    depth: int
    finite: bool
    precovers: list[Precover] = field(default_factory=list)
    syzygies: list[tuple[ZmModule, ModuleMorphism]] = field(default_factory=list)

    @property
    def length(self) -> int:
        lo = self.complex.support
        return 0 if lo is None else -lo[0]

    def aug_map(self) -> ChainMap:
        """The augmentation as a chain map ``complex -> stalk(M)``."""
        return ChainMap(self.complex, Complex.stalk(self.module), {0: self.augmentation})

    def augmented(self) -> Complex:
        """``complex`` with ``M`` appended in degree 1."""
        comps = dict(self.complex.components)
        diffs = dict(self.complex.differentials)
        comps[1] = self.module
        if not self.complex.obj(0).is_zero():
            diffs[0] = self.augmentation
        return Complex(self.module.modulus, comps, diffs)

    def exact_degrees(self) -> list[int]:
        """Degrees of ``augmented()`` where exactness is claimed."""
        bottom = -self.depth + 1 if not self.finite else -self.length
        return list(range(bottom, 2))

    def verify(self) -> dict[str, bool]:
        A = self.augmented()
        degs = self.exact_degrees()
        checks = {
            "components_in_subcategory": self.subcat.contains_complex(self.complex),
            "exact": is_acyclic(A, degs),
            "hom_exact": is_x_acyclic(A, self.subcat, degs),
            "precover_witnesses": all(p.check() for p in self.precovers),
        }
        return checks


def proper_resolution(
    M: ZmModule,
    X: SubcatDescriptor,
    depth: int,
    truncate: bool = False,
    cancel: CancelCheck = None,
) -> ProperResolution:
    """Iterated canonical precovers down to degree ``-depth``.

    With ``truncate=True`` the construction stops at the first syzygy
    ``Ω^n (n >= 1)`` lying in add(generators); it becomes the last component
    and the resolution is finite (exact in every degree).
    """
    if depth < 0:
        raise InputError("depth must be non-negative")
    m = M.modulus
    comps: dict[int, ZmModule] = {}
    diffs: dict[int, ModuleMorphism] = {}
    precovers, syzygies = [], [(M, ModuleMorphism.identity(M))]
    K, incl = M, ModuleMorphism.identity(M)
    aug = None
    finite = M.is_zero()
    for i in range(depth + 1):
        _check_cancel(cancel)
        if K.is_zero():
            finite = True
            break
        if truncate and i >= 1 and X.contains(K):
            comps[-i] = K
            diffs[-i] = incl
            finite = True
            break
        pc = x_precover(K, X)
        precovers.append(pc)
        comps[-i] = pc.cover
        if i == 0:
            aug = pc.map
        else:
            diffs[-i] = incl @ pc.map
        K, incl = kernel(pc.map)
        syzygies.append((K, incl))
    else:
        finite = finite or K.is_zero()
    C = Complex(m, comps, diffs)
    if aug is None:
        aug = ModuleMorphism.zero(C.obj(0), M)
    return ProperResolution(M, X, C, aug, depth, finite, precovers, syzygies)


def syzygy(M: ZmModule, X: SubcatDescriptor, n: int = 1) -> ZmModule:
    """``Ω^n M`` from the canonical precovers."""
    K = M
    for _ in range(n):
        K = kernel(x_precover(K, X).map)[0]
    return K


def x_pd(M: ZmModule, X: SubcatDescriptor, max_depth: int, cancel: CancelCheck = None) -> int | AtLeast:
    """First ``n`` with ``Ω^n M`` in add(generators), or ``AtLeast(max_depth)``."""
    K = M
    for n in range(max_depth + 1):
        _check_cancel(cancel)
        if X.contains(K):
            return n
        if n < max_depth:
            K = kernel(x_precover(K, X).map)[0]
    return AtLeast(max_depth)


# ---------------------------------------------------------------- lifting


@dataclass(frozen=True)
class ShortExactSequence:
    """Degreewise short exact ``0 -> A -(i)-> B -(p)-> C -> 0`` of complexes."""

    i: ChainMap
    p: ChainMap

    def verify(self) -> bool:
        A, B, C = self.i.source, self.i.target, self.p.target
        for n in sorted(set(A.degrees()) | set(B.degrees()) | set(C.degrees())):
            i, p = self.i[n], self.p[n]
            if not (p @ i).is_zero() or not i.is_mono() or not p.is_epi():
                return False
            if A.obj(n).size * C.obj(n).size != B.obj(n).size:
                return False
        return True

    def hom_exact(self, X: SubcatDescriptor) -> bool:
        B = self.i.target
        return all(hom_surjective(G, self.p[n]) for G in X.generators for n in B.degrees())


def lift_through(
    g: ChainMap,
    alpha: ChainMap,
    X: SubcatDescriptor | None = None,
    incl: ChainMap | None = None,
) -> ChainMap:
    """A chain map ``β: D -> M`` with ``g ∘ β = α`` (``g: M -> N``, ``α: D -> N``).

    Descending induction over the degrees of D: a degreewise preimage ``γ^i``
    of ``α^i`` is corrected by ``incl ∘ ν^i`` where ``ν^i: D^i -> Ker(g)^i``
    solves ``δ_K ν^i = ρ^i`` for the obstruction
    ``incl ∘ ρ^i = β^{i+1} δ_D - δ_M γ^i``.

    Raises ``NoPreimage`` if some ``α^i`` has no degreewise preimage and
    ``WindowTooSmall`` if an obstruction cannot be killed (Ker(g) not acyclic
    far enough down).
    """
    M, N, D = g.source, g.target, alpha.source
    if alpha.target != N:
        raise ValueError("alpha must land in the target of g")
    if incl is None:
        _, incl = kernel_complex(g)
    Kc = incl.source
    if D.is_zero():
        return ChainMap.zero(D, M)
    lo, hi = D.support
    beta: dict[int, ModuleMorphism] = {}
    for i in range(hi, lo - 1, -1):
        if D.obj(i).is_zero():
            continue
        gamma = solve_left(g[i], alpha[i])
        if gamma is None:
            raise NoPreimage(f"α^{i} does not factor through g^{i}")
        b_next = beta.get(i + 1, ModuleMorphism.zero(D.obj(i + 1), M.obj(i + 1)))
        rhs = b_next @ D.d(i) - M.d(i) @ gamma
        if rhs.is_zero():
            beta[i] = gamma
            continue
        nu = solve_left(incl[i + 1] @ Kc.d(i), rhs)
        if nu is None:
            raise WindowTooSmall(f"obstruction in degree {i} not killed: Ker(g) not acyclic at degree {i + 1}")
        beta[i] = gamma + incl[i] @ nu
    return ChainMap(D, M, beta)


def lift_module_map(f: ModuleMorphism, src: ProperResolution, tgt: ProperResolution) -> ChainMap:
    """Comparison map ``src.complex -> tgt.complex`` over ``f: src.module -> tgt.module``."""
    N = Complex.stalk(tgt.module)
    alpha = ChainMap(src.complex, N, {0: f @ src.augmentation})
    return lift_through(tgt.aug_map(), alpha, tgt.subcat)


# ---------------------------------------------------------------- resolving complexes


@dataclass
class ResolvedComplex:
    """``0 -> K -> D -> T -> 0`` with D componentwise in 𝒳 and K 𝒳-acyclic."""

    T: Complex
    D: Complex
    K: Complex
    incl: ChainMap  # K -> D
    alpha: ChainMap  # D -> T
    window: tuple[int, int]
    stages: list = field(default_factory=list)

    def sequence(self) -> ShortExactSequence:
        return ShortExactSequence(self.incl, self.alpha)

    def postconditions(self, X: SubcatDescriptor) -> dict[str, bool]:
        lo, hi = self.window
        degs = list(range(lo, hi + 1))
        return {
            "D_in_subcategory": X.contains_complex(self.D),
            "K_x_acyclic": is_x_acyclic(self.K, X, degs),
            "hom_exact_sequence": self.sequence().verify()
            and all(hom_surjective(G, self.alpha[n]) for G in X.generators for n in degs),
            "alpha_x_quasi_iso": is_x_quasi_iso(self.alpha, X, range(lo - 1, hi + 1)),
        }


def resolve_complex(T: Complex, X: SubcatDescriptor, depth: int, cancel: CancelCheck = None) -> ResolvedComplex:
    """Build ``0 -> K -> D -> T -> 0`` degree by degree from the top of ``T``.

    Stage 0 resolves the top component. Stage n resolves ``T^{top-n}``, lifts
    ``δ_T ∘ aug`` through the previous stage (``lift_through``) to a chain map
    ``ψ``, and takes ``D(n) = cone(ψ)``. Every component resolution is finite,
    so requires 𝒳-pd within ``depth`` (``PdExceedsBudget`` otherwise).
    """
    m = T.modulus
    if T.is_zero():
        Z = Complex.zero(m)
        return ResolvedComplex(T, Z, Z, ChainMap.zero(Z, Z), ChainMap.zero(Z, T), (0, 0))
    lo, top = T.support
    width = top - lo
    if depth < width + 1:
        raise WindowTooSmall(f"depth {depth} too small for a complex of width {width} (need >= {width + 1})")
    for n in T.degrees():
        pd = x_pd(T.obj(n), X, depth, cancel)
        if isinstance(pd, AtLeast):
            raise PdExceedsBudget(f"component {T.obj(n)} in degree {n} has {X.name}-pd >= {depth}")
    Tn = shift(T, top)  # normalized: degrees [-width, 0]
    stages = []
    D_prev: Complex | None = None
    alpha_prev: ChainMap | None = None
    for n in range(width + 1):
        _check_cancel(cancel)
        res = proper_resolution(Tn.obj(-n), X, depth, truncate=True, cancel=cancel)
        if not res.finite:  # pragma: no cover - guarded by the x_pd check
            raise PdExceedsBudget(f"resolution of {Tn.obj(-n)} did not terminate within {depth}")
        P = shift(res.complex, n)  # X^0 sits in degree -n
        T_n = Tn.restrict(-n, 0)
        if n == 0:
            D = P
            alpha = ChainMap(D, T_n, {0: res.augmentation})
        else:
            T_prev = alpha_prev.target
            Psh = shift(P, -1)  # P[-1]: degree -n+1 holds X^0
            phi = ChainMap(Psh, T_prev, {-n + 1: Tn.d(-n) @ res.augmentation})
            psi = lift_through(alpha_prev, phi, X)
            C = cone(psi)
            D = C.complex
            comps = {}
            for k in D.degrees():
                B = C.summands(k)
                if k == -n:
                    comps[k] = res.augmentation @ B.projections[0]
                elif k > -n:
                    comps[k] = alpha_prev[k] @ B.projections[1]
            alpha = ChainMap(D, T_n, comps)
            stages.append({"degree": top - n, "psi": psi, "resolution": res})
        D_prev, alpha_prev = D, alpha
    K, incl = kernel_complex(alpha_prev)
    Dn = D_prev
    bottom = Dn.support[0] if not Dn.is_zero() else -width
    # back to the original degrees
    D_out = shift(Dn, -top)
    K_out = shift(K, -top)
    alpha_out = shift_map(alpha_prev, -top)
    alpha_out = ChainMap(D_out, T, alpha_out.components)
    incl_out = ChainMap(K_out, D_out, shift_map(incl, -top).components)
    return ResolvedComplex(T, D_out, K_out, incl_out, alpha_out, (bottom + top, top), stages)


# ---------------------------------------------------------------- splitting / fractions


def split_x_quasi_iso(f: ChainMap, X: SubcatDescriptor | None = None, check: bool = True) -> ChainMap:
    """``g: D -> S`` with ``f ∘ g`` homotopic to ``id_D`` for an 𝒳-quasi-iso ``f: S -> D``.

    Solves one linear system in the unknowns ``g ∈ Hom^0(D, S)`` and
    ``s ∈ Hom^{-1}(D, D)``: ``δ g = 0`` and ``f_* g - δ s = id_D``.
    """
    S, D = f.source, f.target
    if X is not None and check and not is_x_quasi_iso(f, X):
        raise NotXQuasiIso("cone(f) is not 𝒳-acyclic")
    HDS = HomComplex(D, S)
    HDD = HomComplex(D, D)
    fstar, _, _ = postcompose(f, D, HDS, HDD)
    L0, L1 = HDS.layout(0), HDS.layout(1)
    E0, Em1 = HDD.layout(0), HDD.layout(-1)
    n_g, n_s = L0.module.rank, Em1.module.rank
    rows1, rows2 = L1.module.rank, E0.module.rank
    A = np.zeros((rows1 + rows2, n_g + n_s), dtype=np.int64)
    if rows1 and n_g:
        A[:rows1, :n_g] = HDS.complex.d(0).matrix
    if rows2 and n_g:
        A[rows1:, :n_g] = fstar[0].matrix
    if rows2 and n_s:
        A[rows1:, n_g:] = -HDD.complex.d(-1).matrix
    b = np.concatenate([np.zeros(rows1, dtype=np.int64), E0.to_element(ChainMap.identity(D).components)])
    moduli = list(L1.module.orders) + list(E0.module.orders)
    unknown = list(L0.module.orders) + list(Em1.module.orders)
    sol = solve_linear_mod(A, b, moduli, unknown)
    if sol is None:
        raise NotXQuasiIso("no g with f∘g homotopic to id_D (Hom(D, f) not surjective on H^0)")
    g = HDS.chain_map_of(sol[:n_g], 0)
    return ChainMap(D, S, g.components)


@dataclass(frozen=True)
class Fraction:
    """Right fraction ``f / s`` with ``s: roof -> D`` an 𝒳-quasi-iso and ``f: roof -> S``."""

    roof: Complex
    s: ChainMap
    f: ChainMap

    def __post_init__(self):
        if self.s.source != self.roof or self.f.source != self.roof:
            raise ValueError("both legs of a fraction must start at the roof")


def reduce_fraction(fr: Fraction, X: SubcatDescriptor, check: bool = True) -> tuple[ChainMap, ChainMap]:
    """``(f ∘ g, g)`` where ``g = split_x_quasi_iso(s)``: the chain map ``D -> S``
    representing ``f / s`` as ``(f ∘ g) / id``."""
    g = split_x_quasi_iso(fr.s, X, check=check)
    return fr.f @ g, g


def verify_reduction(fr: Fraction, reduced: ChainMap, g: ChainMap) -> dict[str, bool]:
    """The two homotopy witnesses: ``s ∘ g ~ id_D`` and ``(f∘g) ∘ s ~ f``."""
    D = fr.s.target
    return {
        "s_g_homotopic_id": null_homotopy(fr.s @ g - ChainMap.identity(D)) is not None,
        "reduced_s_homotopic_f": null_homotopy(reduced @ fr.s - fr.f) is not None,
    }
