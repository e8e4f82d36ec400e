"""Relative Ext, Tate cohomology (two routes), long exact sequences and the
sequence linking relative, 𝒲-relative and Tate Ext.

Degree conventions: a proper resolution sits in degrees ``[-length, 0]``, so
``Hom^n(𝐗, N) = Hom(X^{-n}, N)`` and ``Ext^n = H^n(Hom(𝐗, N))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .complexes import (
    ChainMap,
    Complex,
    HomComplex,
    Homology,
    cone,
    homology,
    is_acyclic,
    postcompose,
    precompose,
    shift,
)
from .errors import (
    DimensionMismatch,
    InputError,
    NoPreimage,
    NotXAcyclicInput,
    PdExceedsBudget,
    UnsupportedSubcategory,
    WindowTooSmall,
)
from .exact import ExactSequence, long_exact_sequence
from .modules import AbGroup, ModuleMorphism, ZmModule, direct_sum, factorize, image, kernel, solve_left
from .relative import (
    AtLeast,
    ProperResolution,
    ShortExactSequence,
    SubcatDescriptor,
    is_x_acyclic,
    lift_module_map,
    proper_resolution,
    x_pd,
    x_precover,
)


@dataclass
class ExtTable:
    flavor: str
    entries: dict[int, AbGroup]
    depth_used: int

    def to_json(self) -> dict:
        return {
            "flavor": self.flavor,
            "entries": {str(n): g.to_list() for n, g in sorted(self.entries.items())},
            "depth_used": self.depth_used,
        }


# ---------------------------------------------------------------- relative Ext


def _ext_resolution(M: ZmModule, X: SubcatDescriptor, n: int, depth: int | None) -> ProperResolution:
    depth = n + 2 if depth is None else depth
    res = proper_resolution(M, X, depth, truncate=True)
    if not res.finite and depth < n + 2:
        raise WindowTooSmall(f"Ext^{n} needs a resolution of depth >= {n + 2}, got {depth}")
    return res


def relative_ext(M: ZmModule, N: ZmModule, n: int, X: SubcatDescriptor, depth: int | None = None) -> AbGroup:
    """``Ext^n_𝒳(M, N) = H^n(Hom(𝐗, N))`` for a proper 𝒳-resolution 𝐗 of M."""
    if n < 0:
        raise InputError("relative Ext is defined for n >= 0")
    res = _ext_resolution(M, X, n, depth)
    return homology(HomComplex(res.complex, Complex.stalk(N)).complex, n)


def ext_table(M: ZmModule, N: ZmModule, X: SubcatDescriptor, top: int, depth: int | None = None) -> ExtTable:
    depth = top + 2 if depth is None else depth
    if depth < top + 2:
        raise WindowTooSmall(f"depth {depth} < range + 2 = {top + 2}")
    res = proper_resolution(M, X, depth, truncate=True)
    H = HomComplex(res.complex, Complex.stalk(N)).complex
    return ExtTable(X.name, {n: homology(H, n) for n in range(top + 1)}, depth)


def _cyclic_strand(d: int, m: int, lo: int, hi: int) -> Complex:
    """``Z_m`` in degrees ``[lo, hi]``; ``δ^k = ×d`` for odd k, ``×(m/d)`` for even k."""
    F = ZmModule(m, [m])
    comps = {k: F for k in range(lo, hi + 1)}
    diffs = {k: ModuleMorphism.scalar(F, d if k % 2 else m // d) for k in range(lo, hi)}
    return Complex(m, comps, diffs)


def classical_ext(M: ZmModule, N: ZmModule, n: int) -> AbGroup:
    """Textbook Ext over Z/m from the periodic free resolutions of the cyclic summands.

    Independent of the precover machinery; used as an oracle.
    """
    m = M.modulus
    strands = []
    for d in M.orders:
        if d == m:
            strands.append(Complex.stalk(ZmModule(m, [m])))
        else:
            strands.append(_cyclic_strand(d, m, -(n + 2), 0))
    total = Complex.zero(m)
    if strands:
        from .complexes import direct_sum_complexes

        total = direct_sum_complexes(strands, m)[0]
    return homology(HomComplex(total, Complex.stalk(N)).complex, n)


# ---------------------------------------------------------------- Tate: complete resolutions


@dataclass
class TateResolution:
    M: ZmModule
    T: Complex
    W: ProperResolution
    nu: ChainMap
    window: int
    period: int
    strands: tuple[int, ...]
    threshold: int
    checks: dict[str, bool] = field(default_factory=dict)


def _is_proj(W: SubcatDescriptor) -> bool:
    m = W.modulus
    return all(G.orders and all(d == m for d in G.orders) for G in W.generators)


def _primary_split(M: ZmModule):
    """Split ``M`` into its non-projective and projective prime-power parts.

    A prime-power part ``Z_{p^a}`` of a cyclic factor is projective over Z/m
    exactly when ``p^a`` is the full p-part of m. The non-projective parts are
    regrouped prime by prime into invariant factors ``v_1, v_2, ...`` (one
    strand each); every part comes with a generator inside ``M``.
    Returns ``(strands, strand_generators, projective_orders, projective_generators)``.
    """
    m = M.modulus
    full = dict(factorize(m))
    by_prime: dict[int, list[tuple[int, int]]] = {}
    proj_orders, proj_gens = [], []
    for j, d in enumerate(M.orders):
        for p, a in factorize(d):
            q = p**a
            if a < full[p]:
                by_prime.setdefault(p, []).append((q, j))
            else:
                g = np.zeros(M.rank, dtype=np.int64)
                g[j] = d // q
                proj_orders.append(q)
                proj_gens.append(g)
    strands, gens = [], []
    count = max((len(v) for v in by_prime.values()), default=0)
    for k in range(count):
        v, g = 1, np.zeros(M.rank, dtype=np.int64)
        for p, parts in by_prime.items():
            parts = sorted(parts, reverse=True)
            if k < len(parts):
                q, j = parts[k]
                v *= q
                g[j] = (g[j] + M.orders[j] // q) % M.orders[j]
        strands.append(v)
        gens.append(g)
    return tuple(strands), gens, tuple(proj_orders), proj_gens


def _columns(gens: list[np.ndarray], rank: int) -> np.ndarray:
    return np.stack(gens, axis=1) if gens else np.zeros((rank, 0), dtype=np.int64)


def complete_resolution(M: ZmModule, W: SubcatDescriptor | None = None, window: int = 4) -> TateResolution:
    """Totally acyclic complex 𝐓 of free Z/m-modules with a map ``ν: 𝐓 -> P`` to a
    projective resolution ``P`` of ``M`` that is bijective in degrees ``<= threshold``;
    everything is truncated to ``[-window, window]``.

    ``P`` is ``𝐓^{<=0}`` with the projective part ``Q`` of ``M`` added in
    degree 0, so ``ν`` is the identity below degree 0. ``P`` is checked to be a
    projective resolution of ``M`` and compared with the canonical one by a
    lift of the identity of ``M``.
    """
    m = M.modulus
    W = W or SubcatDescriptor.PROJ(m)
    if not _is_proj(W):
        raise UnsupportedSubcategory("complete resolutions are only built for W = PROJ over Z/m")
    if window < 1:
        raise WindowTooSmall("window must be at least 1")
    strands, gens, q_orders, q_gens = _primary_split(M)
    if strands:
        from .complexes import direct_sum_complexes

        T, _, _ = direct_sum_complexes([_cyclic_strand(d, m, -window, window) for d in strands], m)
    else:
        T = Complex.zero(m)
    period = 1
    for d in strands:
        period = math.lcm(period, 1 if d * d == m else 2)

    # P = T^{<=0} + Q[0], augmented by (strand generators, projective generators)
    Q = ZmModule(m, q_orders)
    P0 = direct_sum([T.obj(0), Q], m)
    comps = {k: T.obj(k) for k in range(-window, 0)}
    comps[0] = P0.module
    diffs = {k: T.d(k) for k in range(-window, -1)}
    diffs[-1] = P0.injections[0] @ T.d(-1)
    P = Complex(m, comps, diffs)
    aug = ModuleMorphism(P0.module, M, np.concatenate([_columns(gens, M.rank), _columns(q_gens, M.rank)], axis=1))
    nu = ChainMap(T, P, {k: ModuleMorphism.identity(T.obj(k)) for k in range(-window, 0)} | {0: P0.injections[0]})

    threshold = None
    for i in range(0, -window - 1, -1):
        if all(nu[j].is_iso() for j in range(i, -window - 1, -1)):
            threshold = i
            break

    # comparison with the canonical projective resolution
    Wres = proper_resolution(M, W, window)
    comparison = lift_module_map_from(ChainMap(P, Complex.stalk(M), {0: aug}), Wres)

    interior = range(-window + 1, window)
    checks = {
        "components_free": W.contains_complex(T),
        "exact": is_acyclic(T, interior),
        "hom_exact_from_generators": is_x_acyclic(T, W, interior),
        "hom_exact_into_generators": all(
            is_acyclic(HomComplex(T, Complex.stalk(G)).complex, interior) for G in W.generators
        ),
        "resolution_projective": W.contains_complex(P),
        "resolution_exact": is_acyclic(P, range(-window + 1, 0))
        and aug.is_epi()
        and (aug @ P.d(-1)).is_zero()
        and image(P.d(-1))[0].size * M.size == P0.module.size,
        "comparison_lifts_identity": Wres.augmentation @ comparison[0] == aug,
        "nu_bijective_below_threshold": threshold is not None,
    }
    return TateResolution(M, T, Wres, nu, window, period, strands, threshold if threshold is not None else 0, checks)


def lift_module_map_from(alpha: ChainMap, tgt: ProperResolution) -> ChainMap:
    from .relative import lift_through

    return lift_through(tgt.aug_map(), alpha, tgt.subcat)


def tate_ext_complete(M: ZmModule, N: ZmModule, n: int, window: int | None = None) -> AbGroup:
    """``Êxt^n(M, N) = H^n(Hom(𝐓, N))`` for the complete resolution 𝐓 (any integer n)."""
    window = abs(n) + 2 if window is None else window
    if window < abs(n) + 2:
        raise WindowTooSmall(f"Tate Ext in degree {n} needs window >= {abs(n) + 2}")
    T = complete_resolution(M, None, window).T
    return homology(HomComplex(T, Complex.stalk(N)).complex, n)


def tate_table(M: ZmModule, N: ZmModule, lo: int, hi: int, window: int | None = None) -> ExtTable:
    need = max(abs(lo), abs(hi)) + 2
    window = need if window is None else window
    if window < need:
        raise WindowTooSmall(f"window {window} < {need}")
    T = complete_resolution(M, None, window).T
    H = HomComplex(T, Complex.stalk(N)).complex
    return ExtTable("tate", {n: homology(H, n) for n in range(lo, hi + 1)}, window)


@dataclass
class ConeRoute:
    X_res: ProperResolution
    W_res: ProperResolution
    f: ChainMap
    cone: Complex
    hom: HomComplex


def tate_cone_data(M: ZmModule, N: ZmModule, X: SubcatDescriptor, W: SubcatDescriptor, depth: int) -> ConeRoute:
    pd = x_pd(M, X, depth)
    if isinstance(pd, AtLeast):
        raise PdExceedsBudget(f"{X.name}-pd of {M} exceeds {depth}")
    Xres = proper_resolution(M, X, depth, truncate=True)
    Wres = proper_resolution(M, W, depth, truncate=True)
    f = lift_module_map(ModuleMorphism.identity(M), Wres, Xres)
    C = cone(f).complex
    return ConeRoute(Xres, Wres, f, C, HomComplex(C, Complex.stalk(N)))


def tate_ext_cone(M: ZmModule, N: ZmModule, n: int, X: SubcatDescriptor, W: SubcatDescriptor, depth: int | None = None) -> AbGroup:
    """``H^{n+1}(Hom(cone(f), N))`` for ``f: 𝐖 -> 𝐗`` lifting ``id_M`` (n >= 1)."""
    if n < 1:
        raise InputError("the cone route is defined for n >= 1")
    depth = n + 3 if depth is None else depth
    if depth < n + 3:
        raise WindowTooSmall(f"cone route in degree {n} needs depth >= {n + 3}")
    data = tate_cone_data(M, N, X, W, depth)
    return homology(data.hom.complex, n + 1)


# ---------------------------------------------------------------- module sequences


@dataclass(frozen=True)
class ModuleSES:
    """``0 -> N -(f)-> N' -(g)-> N'' -> 0``."""

    f: ModuleMorphism
    g: ModuleMorphism

    def __post_init__(self):
        if self.f.target != self.g.source:
            raise DimensionMismatch(f"f lands in {self.f.target} but g starts at {self.g.source}")

    def as_complex(self) -> Complex:
        N, N1, N2 = self.f.source, self.f.target, self.g.target
        return Complex(N.modulus, {-1: N, 0: N1, 1: N2}, {-1: self.f, 0: self.g})

    def is_exact(self) -> bool:
        return is_acyclic(self.as_complex(), [-1, 0, 1])

    def is_split(self) -> bool:
        return solve_right(self.f) is not None

    @classmethod
    def split(cls, A: ZmModule, C: ZmModule) -> "ModuleSES":
        B = direct_sum([A, C], A.modulus)
        return cls(B.injections[0], B.projections[1])


def solve_right(f: ModuleMorphism):
    from .modules import solve_right as _sr

    return _sr(f, ModuleMorphism.identity(f.source))


def _check_x_acyclic_ses(seq: ModuleSES, X: SubcatDescriptor) -> None:
    C = seq.as_complex()
    if not is_acyclic(C, [-1, 0, 1]):
        raise NotXAcyclicInput("input is not a short exact sequence")
    if not is_x_acyclic(C, X, [-1, 0, 1]):
        raise NotXAcyclicInput(f"input sequence is not {X.name}-acyclic (Hom(G, -) not exact)")


def les_covariant(M: ZmModule, seq: ModuleSES, X: SubcatDescriptor, top: int) -> ExactSequence:
    """``0 -> Ext^0(M,N) -> Ext^0(M,N') -> Ext^0(M,N'') -> Ext^1(M,N) -> ...``."""
    _check_x_acyclic_ses(seq, X)
    res = proper_resolution(M, X, top + 3, truncate=True)
    Xc = res.complex
    F = ChainMap(Complex.stalk(seq.f.source), Complex.stalk(seq.f.target), {0: seq.f})
    G = ChainMap(Complex.stalk(seq.g.source), Complex.stalk(seq.g.target), {0: seq.g})
    iF, H0, H1 = postcompose(F, Xc)
    pG, _, H2 = postcompose(G, Xc, H1)
    ses = ShortExactSequence(iF, pG)
    names = {"A": "N", "B": "N'", "C": "N''"}
    les = long_exact_sequence(ses, 0, top, lambda k, n: f"Ext{n}(M,{names[k]})", start_with_zero=True)
    modules = {"A": seq.f.source, "B": seq.f.target, "C": seq.g.target}
    cross = {}
    for n in range(top + 1):
        for k, Nk in modules.items():
            term = les.terms[les.index(f"Ext{n}(M,{names[k]})")]
            cross[f"Ext{n}(M,{names[k]})=independent"] = term.group() == relative_ext(M, Nk, n, X, top + 3)
    les.extra_checks = cross
    les.extra_checks["degreewise_exact"] = ses.verify()
    return les


@dataclass
class Horseshoe:
    res: tuple[ProperResolution, ProperResolution, ProperResolution]
    F: ChainMap
    G: ChainMap


def horseshoe(seq: ModuleSES, X: SubcatDescriptor, depth: int) -> Horseshoe:
    """Proper resolutions of N, N', N'' with a degreewise split sequence
    ``0 -> 𝐗_N -> 𝐗_N' -> 𝐗_N'' -> 0`` over ``seq``.

    Stops early (finite resolutions) once all three syzygies lie in 𝒳.
    """
    m = seq.f.source.modulus
    K, K1, K2 = seq.f.source, seq.f.target, seq.g.target
    f, g = seq.f, seq.g
    incl = [ModuleMorphism.identity(K), ModuleMorphism.identity(K1), ModuleMorphism.identity(K2)]
    comps = [{}, {}, {}]
    diffs = [{}, {}, {}]
    Fc, Gc = {}, {}
    augs = [None, None, None]
    precs = [[], [], []]
    finite = False
    for i in range(depth + 1):
        if i >= 1 and all(X.contains(Q) for Q in (K, K1, K2)):
            for a, Q in enumerate((K, K1, K2)):
                if not Q.is_zero():
                    comps[a][-i] = Q
                    diffs[a][-i] = incl[a]
            Fc[-i], Gc[-i] = f, g
            finite = True
            break
        pc, pc2 = x_precover(K, X), x_precover(K2, X)
        h = solve_left(g, pc2.map)
        if h is None:
            raise NoPreimage("precover of N'' does not lift: sequence not Hom(G,-)-exact")
        B = direct_sum([pc.cover, pc2.cover], m)
        e1 = B.map_out([f @ pc.map, h])
        es = [pc.map, e1, pc2.map]
        covers = [pc.cover, B.module, pc2.cover]
        precs[0].append(pc)
        precs[2].append(pc2)
        for a in range(3):
            comps[a][-i] = covers[a]
            if i == 0:
                augs[a] = es[a]
            else:
                diffs[a][-i] = incl[a] @ es[a]
        Fc[-i], Gc[-i] = B.injections[0], B.projections[1]
        (Kn, iK), (K1n, iK1), (K2n, iK2) = kernel(es[0]), kernel(es[1]), kernel(es[2])
        fn = solve_left(iK1, B.injections[0] @ iK)
        gn = solve_left(iK2, B.projections[1] @ iK1)
        if fn is None or gn is None:  # pragma: no cover - 3x3 lemma
            raise NoPreimage("syzygy sequence does not factor")
        K, K1, K2, f, g = Kn, K1n, K2n, fn, gn
        incl = [iK, iK1, iK2]
    mods = (seq.f.source, seq.f.target, seq.g.target)
    resolutions = []
    for a in range(3):
        C = Complex(m, comps[a], diffs[a])
        aug = augs[a] if augs[a] is not None else ModuleMorphism.zero(C.obj(0), mods[a])
        resolutions.append(ProperResolution(mods[a], X, C, aug, depth, finite or (K.is_zero() and K1.is_zero() and K2.is_zero()), precs[a]))
    R0, R1, R2 = resolutions
    F = ChainMap(R0.complex, R1.complex, {k: v for k, v in Fc.items() if not R0.complex.obj(k).is_zero()})
    G = ChainMap(R1.complex, R2.complex, {k: v for k, v in Gc.items() if not R1.complex.obj(k).is_zero()})
    return Horseshoe((R0, R1, R2), F, G)


def les_contravariant(seq: ModuleSES, M: ZmModule, X: SubcatDescriptor, top: int) -> ExactSequence:
    """``0 -> Ext^0(N'',M) -> Ext^0(N',M) -> Ext^0(N,M) -> Ext^1(N'',M) -> ...``."""
    _check_x_acyclic_ses(seq, X)
    hs = horseshoe(seq, X, top + 3)
    R0, R1, R2 = hs.res
    SM = Complex.stalk(M)
    H0, H1, H2 = HomComplex(R0.complex, SM), HomComplex(R1.complex, SM), HomComplex(R2.complex, SM)
    iG, _, _ = precompose(hs.G, SM, H2, H1)  # Hom(X_N'', M) -> Hom(X_N', M)
    pF, _, _ = precompose(hs.F, SM, H1, H0)  # Hom(X_N', M) -> Hom(X_N, M)
    ses = ShortExactSequence(iG, pF)
    names = {"A": "N''", "B": "N'", "C": "N"}
    les = long_exact_sequence(ses, 0, top, lambda k, n: f"Ext{n}({names[k]},M)", start_with_zero=True)
    checks = {"degreewise_exact": ses.verify()}
    for a, (R, nm) in enumerate(((R2, "N''"), (R1, "N'"), (R0, "N"))):
        checks[f"resolution_{nm}_proper"] = all(R.verify().values())
        for n in range(top + 1):
            term = les.terms[les.index(f"Ext{n}({nm},M)")]
            checks[f"Ext{n}({nm},M)=independent"] = term.group() == relative_ext(R.module, M, n, X, top + 3)
    # an independent comparison lift of f must induce the same map on Ext
    beta = lift_module_map(seq.f, R0, R1)
    pB, _, _ = precompose(beta, SM, H1, H0)
    for n in range(top + 1):
        Hs, Ht = Homology(H1.complex, n), Homology(H0.complex, n)
        checks[f"Ext{n}(f,M)_lift_independent"] = Hs.induced_map(pF[n], Ht) == Hs.induced_map(pB[n], Ht)
    les.extra_checks = checks
    return les


# ---------------------------------------------------------------- the relative/Tate sequence


@dataclass
class AMSequence:
    d: int
    top: int
    sequence: ExactSequence
    full: ExactSequence
    checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return self.sequence.exact and self.full.exact and all(self.checks.values())


def am_sequence(M: ZmModule, N: ZmModule, X: SubcatDescriptor, W: SubcatDescriptor, depth: int) -> AMSequence:
    """``0 -> Ext^1_𝒳 -> Ext^1_𝒲 -> Êxt^1_𝒲 -> Ext^2_𝒳 -> ... -> Êxt^d_𝒲 -> 0``
    (continued with ``Ext^n_𝒲 ≅ Êxt^n_𝒲`` above d, up to degree depth-2).

    Obtained from ``0 -> Hom(𝐖[1], N) -> Hom(cone f, N) -> Hom(𝐗, N) -> 0``
    for the lift ``f: 𝐖 -> 𝐗`` of ``id_M``.
    """
    d = x_pd(M, X, depth)
    if isinstance(d, AtLeast):
        raise PdExceedsBudget(f"{X.name}-pd of {M} is at least {depth}")
    top = depth - 2
    if top < max(d, 1):
        raise WindowTooSmall(f"depth {depth} too small: need depth >= {max(d, 1) + 2}")
    data = tate_cone_data(M, N, X, W, depth)
    Cn = cone(data.f)
    SN = Complex.stalk(N)
    W1 = shift(data.W_res.complex, 1)
    HW1 = HomComplex(W1, SN)
    HC = data.hom
    HX = HomComplex(data.X_res.complex, SN)
    proj = ChainMap(Cn.complex, W1, Cn.proj.components)
    i_map, _, _ = precompose(proj, SN, HW1, HC)  # Hom(W[1], N) -> Hom(cone, N)
    p_map, _, _ = precompose(Cn.inj, SN, HC, HX)  # Hom(cone, N) -> Hom(X, N)
    ses = ShortExactSequence(i_map, p_map)

    def label(kind, n):
        if kind == "A":
            return f"Ext{n - 1}_W"
        if kind == "B":
            return f"TateExt{n - 1}"
        return f"Ext{n}_X"

    full = long_exact_sequence(ses, 0, top + 1, label)
    # the segment starting at H^1(cone) = Êxt^0 (certified zero)
    start = full.index("TateExt0")
    end = full.index(f"TateExt{top}")
    seg_labels = full.labels[start:end + 1]
    seg = ExactSequence(
        full.modulus,
        ["0"] + seg_labels[1:],
        [full.terms[start]] + full.terms[start + 1:end + 1],
        full.maps[start:end],
    ).certify()
    checks = {
        "H1_cone_zero": full.terms[start].is_zero(),
        f"Ext{d + 1}_X_zero": full.terms[full.index(f"Ext{d + 1}_X")].is_zero(),
        "degreewise_exact": ses.verify(),
        "full_sequence_exact": full.exact,
    }
    # termination: Êxt^d -> Ext^{d+1}_X is zero and Ext^d_W -> Êxt^d is onto
    k = full.index(f"TateExt{d}")
    checks["tate_terminates_at_d"] = full.maps[k].is_zero() and full.maps[k - 1].is_epi()
    for n in range(1, top + 1):
        if _is_proj(W):
            checks[f"TateExt{n}=complete_route"] = (
                full.terms[full.index(f"TateExt{n}")].group() == tate_ext_complete(M, N, n)
            )
        checks[f"Ext{n}_W=relative_ext"] = full.terms[full.index(f"Ext{n}_W")].group() == relative_ext(M, N, n, W, depth)
        checks[f"Ext{n}_X=relative_ext"] = full.terms[full.index(f"Ext{n}_X")].group() == relative_ext(M, N, n, X, depth)
    return AMSequence(d, top, seg, full, checks)

