"""Finite-support cochain complexes of Z/m-modules.

Conventions (cohomological, differential ``δ^n: X^n -> X^{n+1}``):

* shift: ``X[n]^k = X^{n+k}`` with differential ``(-1)^n δ^{n+k}``; chain maps
  shift without sign.
* Hom complex: ``Hom^n(X, Y) = ∏_k Hom(X^k, Y^{k+n})`` with
  ``δ(f)^k = δ_Y f^k - (-1)^n f^{k+1} δ_X``. Cycles of degree n are chain maps
  ``X -> Y[n]``; boundaries are the null-homotopic ones.
* cone of ``f: X -> Y``: ``cone^n = X^{n+1} ⊕ Y^n`` with differential
  ``[[-δ_X, 0], [f, δ_Y]]``; ``Y -> cone(f) -> X[1]`` are chain maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import DimensionMismatch, ModulusMismatch, NotAChainMap, NotAComplex
from .linalg import solve_linear_mod
from .modules import (
    AbGroup,
    Biproduct,
    HomSpace,
    ModuleMorphism,
    ZmModule,
    cokernel,
    direct_sum,
    hom_space,
    kernel,
    solve_left,
)


class Complex:
    """A bounded cochain complex; zero outside the stored degrees."""

    __slots__ = ("modulus", "_components", "_differentials")

    def __init__(
        self,
        modulus: int,
        components: Mapping[int, ZmModule],
        differentials: Mapping[int, ModuleMorphism] | None = None,
        *,
        check: bool = True,
    ):
        self.modulus = int(modulus)
        comps = {}
        for n, M in components.items():
            if M.modulus != self.modulus:
                raise ModulusMismatch(f"component in degree {n} is over Z/{M.modulus}")
            if not M.is_zero():
                comps[int(n)] = M
        self._components = dict(sorted(comps.items()))
        diffs = {}
        for n, d in (differentials or {}).items():
            n = int(n)
            if d.source != self.obj(n) or d.target != self.obj(n + 1):
                raise DimensionMismatch(
                    f"differential in degree {n} is {d.source}->{d.target}, "
                    f"expected {self.obj(n)}->{self.obj(n + 1)}"
                )
            if not d.is_zero():
                diffs[n] = d
        self._differentials = dict(sorted(diffs.items()))
        if check:
            for n in self._differentials:
                if n + 1 in self._differentials and not (self._differentials[n + 1] @ self._differentials[n]).is_zero():
                    raise NotAComplex(f"δ^{n + 1} ∘ δ^{n} != 0")

    # access
    def obj(self, n: int) -> ZmModule:
        return self._components.get(n) or ZmModule.zero(self.modulus)

    def d(self, n: int) -> ModuleMorphism:
        d = self._differentials.get(n)
        return d if d is not None else ModuleMorphism.zero(self.obj(n), self.obj(n + 1))

    @property
    def components(self) -> dict[int, ZmModule]:
        return dict(self._components)

    @property
    def differentials(self) -> dict[int, ModuleMorphism]:
        return dict(self._differentials)

    def degrees(self) -> list[int]:
        return list(self._components)

    @property
    def support(self) -> tuple[int, int] | None:
        if not self._components:
            return None
        ks = list(self._components)
        return ks[0], ks[-1]

    def is_zero(self) -> bool:
        return not self._components

    # constructors
    @classmethod
    def zero(cls, m: int) -> "Complex":
        return cls(m, {})

    @classmethod
    def stalk(cls, M: ZmModule, n: int = 0) -> "Complex":
        return cls(M.modulus, {n: M})

    @classmethod
    def from_sequence(cls, modules: list[ZmModule], maps: list[ModuleMorphism], start: int) -> "Complex":
        """``modules[0] -> modules[1] -> ...`` starting in degree ``start``."""
        m = modules[0].modulus
        return cls(m, {start + i: M for i, M in enumerate(modules)}, {start + i: f for i, f in enumerate(maps)})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Complex)
            and self.modulus == other.modulus
            and self._components == other._components
            and self._differentials == other._differentials
        )

    def __hash__(self):
        return hash((self.modulus, tuple(self._components.items())))

    def __repr__(self) -> str:
        parts = [f"{n}:{M}" for n, M in self._components.items()]
        return f"Complex(m={self.modulus}, {', '.join(parts) or '0'})"

    def size_in_window(self, lo: int, hi: int) -> int:
        return sum(self.obj(n).size for n in range(lo, hi + 1))

    def restrict(self, lo: int, hi: int) -> "Complex":
        """Brutal truncation to degrees ``[lo, hi]``."""
        comps = {n: M for n, M in self._components.items() if lo <= n <= hi}
        diffs = {n: d for n, d in self._differentials.items() if lo <= n and n + 1 <= hi}
        return Complex(self.modulus, comps, diffs, check=False)


class ChainMap:
    """Degreewise morphisms ``f^n: X^n -> Y^n`` commuting with the differentials."""

    __slots__ = ("source", "target", "_components")

    def __init__(self, source: Complex, target: Complex, components: Mapping[int, ModuleMorphism] | None = None, *, check: bool = True):
        if source.modulus != target.modulus:
            raise ModulusMismatch("chain map between complexes over different moduli")
        self.source, self.target = source, target
        comps = {}
        for n, f in (components or {}).items():
            n = int(n)
            if f.source != source.obj(n) or f.target != target.obj(n):
                raise DimensionMismatch(f"component in degree {n} has wrong source/target")
            if not f.is_zero():
                comps[n] = f
        self._components = dict(sorted(comps.items()))
        if check:
            bad = self.failures()
            if bad:
                raise NotAChainMap(f"δf != fδ in degrees {bad}")

    def __getitem__(self, n: int) -> ModuleMorphism:
        f = self._components.get(n)
        return f if f is not None else ModuleMorphism.zero(self.source.obj(n), self.target.obj(n))

    @property
    def components(self) -> dict[int, ModuleMorphism]:
        return dict(self._components)

    def degrees(self) -> list[int]:
        ds = set(self.source.degrees()) | set(self.target.degrees())
        return sorted(ds)

    def failures(self) -> list[int]:
        ds = set(self.source.degrees()) | set(self.target.degrees())
        ds |= {n - 1 for n in ds}
        return [n for n in sorted(ds) if self.target.d(n) @ self[n] != self[n + 1] @ self.source.d(n)]

    @classmethod
    def identity(cls, X: Complex) -> "ChainMap":
        return cls(X, X, {n: ModuleMorphism.identity(X.obj(n)) for n in X.degrees()}, check=False)

    @classmethod
    def zero(cls, X: Complex, Y: Complex) -> "ChainMap":
        return cls(X, Y, {}, check=False)

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self ∘ other``."""
        if other.target != self.source:
            raise DimensionMismatch("chain maps do not compose")
        ds = set(other.source.degrees()) & set(self.target.degrees())
        return ChainMap(other.source, self.target, {n: self[n] @ other[n] for n in ds}, check=False)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        return self.compose(other)

    def _combine(self, other: "ChainMap", op) -> "ChainMap":
        if self.source != other.source or self.target != other.target:
            raise DimensionMismatch("chain maps with different source/target")
        ds = set(self._components) | set(other._components)
        return ChainMap(self.source, self.target, {n: op(self[n], other[n]) for n in ds}, check=False)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return ChainMap(self.source, self.target, {n: -f for n, f in self._components.items()}, check=False)

    def is_zero(self) -> bool:
        return not self._components

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ChainMap)
            and self.source == other.source
            and self.target == other.target
            and self._components == other._components
        )

    def __hash__(self):
        return hash((self.source, self.target))

    def __repr__(self) -> str:
        return f"ChainMap({self.source!r} -> {self.target!r})"


class Homotopy:
    """Components ``s^n: X^n -> Y^{n-1}``."""

    __slots__ = ("source", "target", "_components")

    def __init__(self, source: Complex, target: Complex, components: Mapping[int, ModuleMorphism] | None = None):
        self.source, self.target = source, target
        comps = {}
        for n, s in (components or {}).items():
            if s.source != source.obj(n) or s.target != target.obj(n - 1):
                raise DimensionMismatch(f"homotopy component in degree {n} has wrong source/target")
            if not s.is_zero():
                comps[int(n)] = s
        self._components = comps

    def __getitem__(self, n: int) -> ModuleMorphism:
        s = self._components.get(n)
        return s if s is not None else ModuleMorphism.zero(self.source.obj(n), self.target.obj(n - 1))

    @property
    def components(self) -> dict[int, ModuleMorphism]:
        return dict(self._components)

    def boundary(self) -> ChainMap:
        """The null-homotopic chain map ``δ s + s δ``."""
        X, Y = self.source, self.target
        ds = set(X.degrees()) | set(Y.degrees())
        comps = {n: Y.d(n - 1) @ self[n] + self[n + 1] @ X.d(n) for n in ds}
        return ChainMap(X, Y, comps, check=False)

    def witnesses(self, f: ChainMap, g: ChainMap | None = None) -> bool:
        """Whether ``f - g = δ s + s δ`` in every degree."""
        diff = f if g is None else f - g
        return diff == self.boundary()


# ---------------------------------------------------------------- shift / cone


def shift(X: Complex, n: int) -> Complex:
    """``X[n]``: component k is ``X^{n+k}``, differential ``(-1)^n δ^{n+k}``."""
    sign = -1 if n % 2 else 1
    comps = {k - n: M for k, M in X.components.items()}
    diffs = {k - n: d * sign for k, d in X.differentials.items()}
    return Complex(X.modulus, comps, diffs, check=False)


def shift_map(f: ChainMap, n: int) -> ChainMap:
    return ChainMap(shift(f.source, n), shift(f.target, n), {k - n: g for k, g in f.components.items()}, check=False)


@dataclass(frozen=True)
class Cone:
    """``cone(f)`` with its degreewise biproducts (summand 0 = X^{n+1}, 1 = Y^n)."""

    map: ChainMap
    complex: Complex
    sums: dict
    inj: ChainMap  # Y -> cone(f)
    proj: ChainMap  # cone(f) -> X[1]

    def summands(self, n: int) -> Biproduct:
        return self.sums[n]


def cone(f: ChainMap) -> Cone:
    X, Y, m = f.source, f.target, f.source.modulus
    degs = sorted({k - 1 for k in X.degrees()} | set(Y.degrees()))
    sums = {}
    for n in range(degs[0] - 1, degs[-1] + 2) if degs else []:
        sums[n] = direct_sum([X.obj(n + 1), Y.obj(n)], m)
    comps = {n: B.module for n, B in sums.items()}
    diffs = {}
    for n in sums:
        if n + 1 in sums:
            diffs[n] = sums[n].from_blocks(sums[n + 1], [[-X.d(n + 1), None], [f[n + 1], Y.d(n)]])
    C = Complex(m, comps, diffs)
    X1 = shift(X, 1)
    inj = ChainMap(Y, C, {n: sums[n].injections[1] for n in Y.degrees()})
    proj = ChainMap(C, X1, {n: sums[n].projections[0] for n in sums if not X1.obj(n).is_zero()})
    return Cone(f, C, sums, inj, proj)


def direct_sum_complexes(Xs: list[Complex], modulus: int) -> tuple[Complex, list[ChainMap], list[ChainMap]]:
    degs = sorted(set().union(*[X.degrees() for X in Xs])) if Xs else []
    sums = {n: direct_sum([X.obj(n) for X in Xs], modulus) for n in degs}
    diffs = {}
    for n in degs:
        if n + 1 in sums:
            diffs[n] = sums[n].from_blocks(
                sums[n + 1], [[X.d(n) if a == b else None for b in range(len(Xs))] for a, X in enumerate(Xs)]
            )
    S = Complex(modulus, {n: B.module for n, B in sums.items()}, diffs, check=False)
    injs = [ChainMap(X, S, {n: sums[n].injections[a] for n in X.degrees()}, check=False) for a, X in enumerate(Xs)]
    projs = [ChainMap(S, X, {n: sums[n].projections[a] for n in X.degrees()}, check=False) for a, X in enumerate(Xs)]
    return S, injs, projs


# ---------------------------------------------------------------- Hom complex


@dataclass(frozen=True)
class HomDegree:
    """Layout of ``Hom^n(X, Y)``: blocks ``(k, Hom(X^k, Y^{k+n}))`` and a permutation.

    Layout position ``p`` (blocks concatenated by increasing k) sits at module
    coordinate ``pos[p]`` of the canonical (descending) component module.
    """

    n: int
    blocks: tuple[tuple[int, HomSpace, int], ...]  # (k, space, offset)
    module: ZmModule
    pos: np.ndarray

    def to_element(self, parts: Mapping[int, ModuleMorphism]) -> np.ndarray:
        v = np.zeros(self.module.rank, dtype=np.int64)
        for k, H, off in self.blocks:
            f = parts.get(k)
            if f is not None:
                c = H.to_coords(f)
                v[self.pos[off:off + len(c)]] = c
        return v

    def from_element(self, v) -> dict[int, ModuleMorphism]:
        v = np.asarray(v, dtype=np.int64).reshape(-1)
        out = {}
        for k, H, off in self.blocks:
            out[k] = H.from_coords(v[self.pos[off:off + len(H.orders)]])
        return out


class HomComplex:
    """``Hom(X, Y)`` as a complex of Z/m-modules plus the coordinate layouts."""

    def __init__(self, X: Complex, Y: Complex):
        if X.modulus != Y.modulus:
            raise ModulusMismatch("Hom between complexes over different moduli")
        self.X, self.Y, m = X, Y, X.modulus
        self.layouts: dict[int, HomDegree] = {}
        if X.is_zero() or Y.is_zero():
            self.complex = Complex.zero(m)
            return
        (xl, xh), (yl, yh) = X.support, Y.support
        for n in range(yl - xh - 1, yh - xl + 2):
            blocks, orders, off = [], [], 0
            for k in X.degrees():
                if Y.obj(k + n).is_zero():
                    continue
                H = hom_space(X.obj(k), Y.obj(k + n))
                if not H.orders:
                    continue
                blocks.append((k, H, off))
                orders.extend(H.orders)
                off += len(H.orders)
            order = sorted(range(len(orders)), key=lambda p: (-orders[p], p))
            pos = np.empty(len(orders), dtype=np.int64)
            pos[order] = np.arange(len(orders))
            self.layouts[n] = HomDegree(n, tuple(blocks), ZmModule(m, orders), pos)
        diffs = {}
        for n, L in self.layouts.items():
            if n + 1 in self.layouts and L.module.rank and self.layouts[n + 1].module.rank:
                diffs[n] = self._differential(n)
        self.complex = Complex(m, {n: L.module for n, L in self.layouts.items()}, diffs)

    def layout(self, n: int) -> HomDegree:
        L = self.layouts.get(n)
        if L is None:
            return HomDegree(n, (), ZmModule.zero(self.X.modulus), np.zeros(0, dtype=np.int64))
        return L

    def _differential(self, n: int) -> ModuleMorphism:
        src, tgt = self.layouts[n], self.layouts[n + 1]
        sign = -1 if n % 2 else 1
        A = np.zeros((tgt.module.rank, src.module.rank), dtype=np.int64)
        for k, H, off in src.blocks:
            for b, f in enumerate(H.basis()):
                parts = {}
                dyf = self.Y.d(k + n) @ f
                if not dyf.is_zero():
                    parts[k] = dyf
                fdx = f @ self.X.d(k - 1)
                if not fdx.is_zero():
                    parts[k - 1] = -(fdx * sign)
                A[:, src.pos[off + b]] = tgt.to_element(parts)
        return ModuleMorphism(src.module, tgt.module, A)

    def element_of(self, f: ChainMap | Homotopy | Mapping[int, ModuleMorphism], n: int | None = None) -> np.ndarray:
        if isinstance(f, ChainMap):
            return self.layout(0 if n is None else n).to_element(f.components)
        if isinstance(f, Homotopy):
            return self.layout(-1).to_element(f.components)
        return self.layout(n).to_element(f)

    def chain_map_of(self, v, n: int = 0) -> ChainMap:
        """A degree-``n`` cycle as a chain map ``X -> Y[n]``."""
        parts = self.layout(n).from_element(v)
        Yn = shift(self.Y, n)
        return ChainMap(self.X, Yn, {k: f for k, f in parts.items()}, check=True)

    def map_from(self, other: "HomComplex", n: int, fn: Callable[[int, ModuleMorphism], Mapping[int, ModuleMorphism]]) -> ModuleMorphism:
        """Degree-n component of the map ``other -> self`` that sends a basis
        morphism in block k to ``fn(k, f)`` (a dict of blocks of self)."""
        src, tgt = other.layout(n), self.layout(n)
        A = np.zeros((tgt.module.rank, src.module.rank), dtype=np.int64)
        for k, H, off in src.blocks:
            for b, f in enumerate(H.basis()):
                A[:, src.pos[off + b]] = tgt.to_element(fn(k, f))
        return ModuleMorphism(src.module, tgt.module, A)

    def induced(self, other: "HomComplex", fn) -> ChainMap:
        degs = set(self.layouts) | set(other.layouts)
        comps = {n: self.map_from(other, n, lambda k, f, n=n: fn(n, k, f)) for n in degs}
        return ChainMap(other.complex, self.complex, comps)


def hom_complex(X: Complex, Y: Complex) -> HomComplex:
    return HomComplex(X, Y)


def postcompose(g: ChainMap, X: Complex, H_src: HomComplex | None = None, H_tgt: HomComplex | None = None) -> tuple[ChainMap, HomComplex, HomComplex]:
    """``Hom(X, g): Hom(X, Y) -> Hom(X, Y')`` for ``g: Y -> Y'``."""
    Hs = H_src or HomComplex(X, g.source)
    Ht = H_tgt or HomComplex(X, g.target)
    return Ht.induced(Hs, lambda n, k, f: {k: g[k + n] @ f}), Hs, Ht


def precompose(h: ChainMap, Y: Complex, H_src: HomComplex | None = None, H_tgt: HomComplex | None = None) -> tuple[ChainMap, HomComplex, HomComplex]:
    """``Hom(h, Y): Hom(X, Y) -> Hom(X', Y)`` for ``h: X' -> X``."""
    Hs = H_src or HomComplex(h.target, Y)
    Ht = H_tgt or HomComplex(h.source, Y)
    return Ht.induced(Hs, lambda n, k, f: {k: f @ h[k]}), Hs, Ht


# ---------------------------------------------------------------- homology


class Homology:
    """``H^n(C) = ker δ^n / im δ^{n-1}`` with explicit cycle representatives."""

    def __init__(self, C: Complex, n: int):
        self.C, self.n = C, n
        self.Z, self.incl = kernel(C.d(n))
        b = solve_left(self.incl, C.d(n - 1))
        if b is None:  # pragma: no cover - δ∘δ = 0 guarantees a factorization
            raise NotAComplex(f"image of δ^{n - 1} not inside ker δ^{n}")
        self.boundary_lift = b
        self.H, self.proj = cokernel(b)

    @property
    def group(self) -> AbGroup:
        return self.H.group()

    def class_of(self, cycle) -> np.ndarray:
        """Coordinates in ``H`` of the class of a cycle of ``C^n``."""
        x = np.asarray(cycle, dtype=np.int64).reshape(-1)
        if self.C.obj(self.n).rank == 0:
            return np.zeros(self.H.rank, dtype=np.int64)
        m = self.C.modulus
        v = ModuleMorphism(ZmModule(m, [m]), self.C.obj(self.n), x.reshape(-1, 1))
        z = solve_left(self.incl, v)
        if z is None:
            raise ValueError("not a cycle")
        return self.proj.apply(z.matrix[:, 0])

    def is_boundary(self, cycle) -> bool:
        return not self.class_of(cycle).any()

    def representative(self, h) -> np.ndarray:
        """A cycle representing the class with coordinates ``h``."""
        h = np.asarray(h, dtype=np.int64).reshape(-1)
        m = self.C.modulus
        if self.H.rank == 0:
            return np.zeros(self.C.obj(self.n).rank, dtype=np.int64)
        hv = ModuleMorphism(ZmModule(m, [m]), self.H, h.reshape(-1, 1))
        z = solve_left(self.proj, hv)
        return self.incl.apply(z.matrix[:, 0])

    def generators(self) -> list[np.ndarray]:
        return [self.representative(e) for e in np.eye(self.H.rank, dtype=np.int64)]

    def induced_map(self, f: ModuleMorphism, other: "Homology") -> ModuleMorphism:
        """``H^n(C) -> H^n(C')`` induced by a degree-n component of a chain map."""
        cols = [other.class_of(f.apply(g)) for g in self.generators()]
        A = np.stack(cols, axis=1) if cols else np.zeros((other.H.rank, 0), dtype=np.int64)
        return ModuleMorphism(self.H, other.H, A)


def homology(C: Complex, n: int) -> AbGroup:
    return Homology(C, n).group


def homology_sizes(C: Complex) -> dict[int, int]:
    if C.is_zero():
        return {}
    lo, hi = C.support
    return {n: homology(C, n).order for n in range(lo, hi + 1)}


def is_acyclic(C: Complex, degrees: Iterable[int] | None = None) -> bool:
    if C.is_zero():
        return True
    lo, hi = C.support
    degs = range(lo, hi + 1) if degrees is None else degrees
    return all(homology(C, n).is_trivial() for n in degs)


def hom_k(X: Complex, Y: Complex, n: int) -> AbGroup:
    """Homotopy classes of chain maps ``X -> Y[n]``."""
    return homology(HomComplex(X, Y).complex, n)


def null_homotopy(f: ChainMap, H: HomComplex | None = None) -> Homotopy | None:
    """A homotopy ``s`` with ``f = δ s + s δ``, or None if ``f`` is not null-homotopic.

    Solved as one linear system ``δ^{-1}_{Hom}(s) = f`` over the Hom complex.
    """
    H = H or HomComplex(f.source, f.target)
    target = H.layout(0)
    src = H.layout(-1)
    v = target.to_element(f.components)
    if not v.any():
        return Homotopy(f.source, f.target, {})
    if src.module.rank == 0:
        return None
    d = H.complex.d(-1)
    s = solve_linear_mod(d.matrix, v, target.module.orders, src.module.orders)
    if s is None:
        return None
    parts = src.from_element(s)
    return Homotopy(f.source, f.target, parts)


def is_null_homotopic(f: ChainMap) -> bool:
    return null_homotopy(f) is not None


def is_quasi_iso(f: ChainMap) -> bool:
    return is_acyclic(cone(f).complex)


def kernel_complex(f: ChainMap) -> tuple[Complex, ChainMap]:
    """Degreewise kernel of a chain map, with its inclusion."""
    X = f.source
    incls = {n: kernel(f[n])[1] for n in X.degrees()}
    comps = {n: i.source for n, i in incls.items()}
    diffs = {}
    for n, i in incls.items():
        if n + 1 in incls:
            d = solve_left(incls[n + 1], X.d(n) @ i)
            if d is None:  # pragma: no cover
                raise NotAChainMap("kernel not preserved by the differential")
            diffs[n] = d
    K = Complex(X.modulus, comps, diffs)
    return K, ChainMap(K, X, incls)
