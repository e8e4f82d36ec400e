"""Finitely generated Z/m-modules in cyclic form and the maps between them.

A module ``ZmModule(m, (d_1, ..., d_k))`` is ``Z_{d_1} + ... + Z_{d_k}`` with
every ``d_i | m``; elements are integer vectors with coordinate ``i`` read
modulo ``d_i``. A morphism is an integer matrix (rows = target factors,
columns = source factors) whose entry ``a_ij`` makes ``x -> a_ij x`` well
defined ``Z_{d_j} -> Z_{d_i}``, i.e. ``d_i / gcd(d_i, d_j)`` divides ``a_ij``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, IllDefinedMorphism, InputError, ModulusMismatch
from .linalg import diagonalize, kernel_mod, smith_normal_form, solve_linear_mod

MAX_MODULUS = 2**24  # keeps int64 matrix products exact at desk-scale ranks


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization ``((p, a), ...)`` of ``n >= 1``."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        p += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def prime_power_parts(orders: Iterable[int]) -> list[int]:
    """Multiset of prime-power orders of ``Z_{d_1} + ...`` (sorted descending)."""
    parts = [p**a for d in orders for p, a in factorize(int(d))]
    return sorted(parts, reverse=True)


def invariant_factors(orders: Iterable[int]) -> list[int]:
    """Invariant factors ``e_1 | e_2 | ...`` (ascending) of ``Z_{d_1} + ...``."""
    by_prime: dict[int, list[int]] = {}
    for d in orders:
        for p, a in factorize(int(d)):
            by_prime.setdefault(p, []).append(p**a)
    if not by_prime:
        return []
    n = max(len(v) for v in by_prime.values())
    out = [1] * n
    for powers in by_prime.values():
        powers.sort(reverse=True)
        for k, q in enumerate(powers):
            out[k] *= q
    return sorted(out)


# ---------------------------------------------------------------- AbGroup


@dataclass(frozen=True)
class AbGroup:
    """Finite abelian group in invariant-factor form (ascending divisibility chain)."""

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        f = tuple(int(e) for e in self.invariant_factors)
        if any(e < 2 for e in f) or any(f[i + 1] % f[i] for i in range(len(f) - 1)):
            raise ValueError(f"not an invariant-factor chain: {f}")
        object.__setattr__(self, "invariant_factors", f)

    @classmethod
    def from_orders(cls, orders: Iterable[int]) -> "AbGroup":
        return cls(tuple(invariant_factors(d for d in orders if int(d) > 1)))

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " ⊕ ".join(f"Z{e}" for e in self.invariant_factors)

    def to_list(self) -> list[int]:
        return list(self.invariant_factors)


# ---------------------------------------------------------------- ZmModule

_LITERAL = re.compile(r"^\s*(?P<body>[^@]*?)\s*(?:@\s*(?P<m>\d+))?\s*$")


@dataclass(frozen=True, init=False)
class ZmModule:
    modulus: int
    orders: tuple[int, ...]

    def __init__(self, modulus: int, orders: Iterable[int] = ()):
        modulus = int(modulus)
        if modulus < 2:
            raise ValueError("modulus must be at least 2")
        if modulus >= MAX_MODULUS:
            raise ValueError(f"modulus must be below {MAX_MODULUS}")
        ords = [int(d) for d in orders]
        for d in ords:
            if d < 1 or modulus % d:
                raise ValueError(f"cyclic order {d} does not divide modulus {modulus}")
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "orders", tuple(sorted((d for d in ords if d > 1), reverse=True)))

    # constructors
    @classmethod
    def zero(cls, m: int) -> "ZmModule":
        return cls(m, ())

    @classmethod
    def cyclic(cls, d: int, m: int) -> "ZmModule":
        return cls(m, (d,))

    @classmethod
    def free(cls, rank: int, m: int) -> "ZmModule":
        return cls(m, (m,) * rank)

    @classmethod
    def parse(cls, text: str, modulus: int | None = None) -> "ZmModule":
        """Parse ``Z4+Z2+Z2@4`` (the ``@m`` suffix may be replaced by ``modulus``)."""
        match = _LITERAL.match(str(text))
        if not match:
            raise InputError(f"malformed module literal {text!r}")
        body, m = match.group("body"), match.group("m")
        if m is not None:
            m = int(m)
            if modulus is not None and m != modulus:
                raise InputError(f"literal {text!r} has modulus {m}, expected {modulus}")
        else:
            m = modulus
        if m is None:
            raise InputError(f"module literal {text!r} needs a modulus (suffix @m)")
        orders = []
        if body not in ("", "0"):
            for term in body.replace("⊕", "+").split("+"):
                term = term.strip()
                tm = re.fullmatch(r"Z(\d+)(?:\^(\d+))?", term)
                if not tm:
                    raise InputError(f"malformed summand {term!r} in {text!r}")
                orders += [int(tm.group(1))] * int(tm.group(2) or 1)
        try:
            return cls(m, orders)
        except ValueError as exc:
            raise InputError(str(exc)) from exc

    # properties
    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    def is_zero(self) -> bool:
        return not self.orders

    def group(self) -> AbGroup:
        return AbGroup.from_orders(self.orders)

    def is_isomorphic(self, other: "ZmModule") -> bool:
        return self.modulus == other.modulus and self.group() == other.group()

    def order_array(self) -> np.ndarray:
        return np.array(self.orders, dtype=np.int64)

    def reduce(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64).reshape(-1)
        if x.shape[0] != self.rank:
            raise DimensionMismatch(f"vector of length {x.shape[0]} in module of rank {self.rank}")
        return x % self.order_array() if self.rank else x

    def elements(self) -> Iterator[np.ndarray]:
        """Every element (for brute-force checks on small modules)."""
        import itertools

        for t in itertools.product(*[range(d) for d in self.orders]):
            yield np.array(t, dtype=np.int64)

    def literal(self) -> str:
        body = "+".join(f"Z{d}" for d in self.orders) or "0"
        return f"{body}@{self.modulus}"

    def __str__(self) -> str:
        return self.literal()


def _check_same_modulus(*modules: ZmModule) -> int:
    ms = {M.modulus for M in modules}
    if len(ms) > 1:
        raise ModulusMismatch(f"modules over different moduli {sorted(ms)}")
    return ms.pop() if ms else 0


# ---------------------------------------------------------------- morphisms


def _constraint(target_orders, source_orders) -> np.ndarray:
    """``u_ij = t_i / gcd(t_i, s_j)``: entry ``a_ij`` must be a multiple of ``u_ij``."""
    t = np.asarray(target_orders, dtype=np.int64).reshape(-1, 1)
    s = np.asarray(source_orders, dtype=np.int64).reshape(1, -1)
    if t.size == 0 or s.size == 0:
        return np.zeros((t.size, s.size), dtype=np.int64)
    return t // np.gcd(t, s)


class ModuleMorphism:
    """Immutable Z/m-linear map ``source -> target`` given by a constrained matrix."""

    __slots__ = ("source", "target", "matrix", "_hash")

    def __init__(self, source: ZmModule, target: ZmModule, matrix=None, *, check: bool = True):
        _check_same_modulus(source, target)
        shape = (target.rank, source.rank)
        if matrix is None:
            A = np.zeros(shape, dtype=np.int64)
        else:
            A = np.array(matrix, dtype=np.int64)
            if A.size == 0:
                A = A.reshape(shape)
            if A.shape != shape:
                raise DimensionMismatch(f"matrix of shape {A.shape}, expected {shape} for {source} -> {target}")
        if target.rank:
            A = A % target.order_array().reshape(-1, 1)
        if check and A.size and np.any(A % _constraint(target.orders, source.orders)):
            raise IllDefinedMorphism(f"matrix {A.tolist()} is not a well-defined map {source} -> {target}")
        A.setflags(write=False)
        self.source, self.target, self.matrix = source, target, A
        self._hash = None

    # constructors
    @classmethod
    def identity(cls, M: ZmModule) -> "ModuleMorphism":
        return cls(M, M, np.eye(M.rank, dtype=np.int64), check=False)

    @classmethod
    def zero(cls, M: ZmModule, N: ZmModule) -> "ModuleMorphism":
        return cls(M, N, None, check=False)

    @classmethod
    def scalar(cls, M: ZmModule, c: int) -> "ModuleMorphism":
        return cls(M, M, int(c) * np.eye(M.rank, dtype=np.int64), check=False)

    # algebra
    def compose(self, other: "ModuleMorphism") -> "ModuleMorphism":
        """``self ∘ other``."""
        if other.target != self.source:
            raise DimensionMismatch(f"cannot compose {other.source}->{other.target} with {self.source}->{self.target}")
        return ModuleMorphism(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __matmul__(self, other: "ModuleMorphism") -> "ModuleMorphism":
        return self.compose(other)

    def _same_shape(self, other):
        if self.source != other.source or self.target != other.target:
            raise DimensionMismatch("morphisms with different source/target")

    def __add__(self, other: "ModuleMorphism") -> "ModuleMorphism":
        self._same_shape(other)
        return ModuleMorphism(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "ModuleMorphism") -> "ModuleMorphism":
        self._same_shape(other)
        return ModuleMorphism(self.source, self.target, self.matrix - other.matrix, check=False)

    def __neg__(self) -> "ModuleMorphism":
        return ModuleMorphism(self.source, self.target, -self.matrix, check=False)

    def __mul__(self, c: int) -> "ModuleMorphism":
        return ModuleMorphism(self.source, self.target, int(c) * self.matrix, check=False)

    __rmul__ = __mul__

    def apply(self, x) -> np.ndarray:
        x = self.source.reduce(x)
        return self.target.reduce(self.matrix @ x) if self.target.rank else np.zeros(0, dtype=np.int64)

    def is_zero(self) -> bool:
        return not np.any(self.matrix)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModuleMorphism)
            and self.source == other.source
            and self.target == other.target
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.source, self.target, self.matrix.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        return f"ModuleMorphism({self.source} -> {self.target}, {self.matrix.tolist()})"

    # properties via kernel/image
    def image_size(self) -> int:
        return image(self)[0].size

    def is_mono(self) -> bool:
        return self.image_size() == self.source.size

    def is_epi(self) -> bool:
        return self.image_size() == self.target.size

    def is_iso(self) -> bool:
        return self.source.size == self.target.size and self.is_mono()


# ---------------------------------------------------------------- Hom


@dataclass(frozen=True)
class HomSpace:
    """Coordinates on ``Hom(M, N)``.

    Slot ``k`` is a factor pair ``(i, j)`` (target factor ``i``, source factor
    ``j``) with ``g = gcd(t_i, s_j) > 1``; its coordinate ``c in Z_g`` stands for
    the entry ``a_ij = c * t_i / g``. Slots are ordered by descending ``g``.
    """

    source: ZmModule
    target: ZmModule
    slots: tuple[tuple[int, int], ...]
    orders: tuple[int, ...]
    steps: tuple[int, ...]

    @property
    def module(self) -> ZmModule:
        return ZmModule(self.source.modulus, self.orders)

    def group(self) -> AbGroup:
        return AbGroup.from_orders(self.orders)

    def from_coords(self, c) -> ModuleMorphism:
        A = np.zeros((self.target.rank, self.source.rank), dtype=np.int64)
        for (i, j), step, v in zip(self.slots, self.steps, np.asarray(c, dtype=np.int64).reshape(-1)):
            A[i, j] = int(v) * step
        return ModuleMorphism(self.source, self.target, A, check=False)

    def to_coords(self, f: ModuleMorphism) -> np.ndarray:
        if f.source != self.source or f.target != self.target:
            raise DimensionMismatch("morphism not in this Hom space")
        out = np.zeros(len(self.slots), dtype=np.int64)
        for k, ((i, j), step) in enumerate(zip(self.slots, self.steps)):
            out[k] = int(f.matrix[i, j]) // step
        return out

    def basis(self) -> list[ModuleMorphism]:
        n = len(self.slots)
        return [self.from_coords(np.eye(n, dtype=np.int64)[k]) for k in range(n)]


@lru_cache(maxsize=4096)
def hom_space(M: ZmModule, N: ZmModule) -> HomSpace:
    _check_same_modulus(M, N)
    entries = []
    for i, t in enumerate(N.orders):
        for j, s in enumerate(M.orders):
            g = math.gcd(t, s)
            if g > 1:
                entries.append((-g, i, j, t // g))
    entries.sort()
    return HomSpace(
        M,
        N,
        tuple((i, j) for _, i, j, _ in entries),
        tuple(-g for g, _, _, _ in entries),
        tuple(step for *_, step in entries),
    )


def hom_group(M: ZmModule, N: ZmModule) -> tuple[AbGroup, list[ModuleMorphism]]:
    """``Hom(M, N)`` as an abelian group together with a generating basis."""
    H = hom_space(M, N)
    return H.group(), H.basis()


# ---------------------------------------------------------------- solving


def solve_left(F: ModuleMorphism, H: ModuleMorphism) -> ModuleMorphism | None:
    """Some ``X`` with ``F ∘ X == H`` (``X: H.source -> F.source``), or None."""
    if F.target != H.target:
        raise DimensionMismatch("solve_left: F and H must share a target")
    A, Z, B = F.source, H.source, F.target
    X = np.zeros((A.rank, Z.rank), dtype=np.int64)
    a = np.array(A.orders, dtype=np.int64)
    for col, z in enumerate(Z.orders):
        unk = np.gcd(a, z)
        u = a // unk
        c = solve_linear_mod(F.matrix * u.reshape(1, -1), H.matrix[:, col], B.orders, [int(v) for v in unk])
        if c is None:
            return None
        X[:, col] = (u * c) % a
    return ModuleMorphism(Z, A, X, check=False)


def solve_right(F: ModuleMorphism, H: ModuleMorphism) -> ModuleMorphism | None:
    """Some ``Y`` with ``Y ∘ F == H`` (``Y: F.target -> H.target``), or None."""
    if F.source != H.source:
        raise DimensionMismatch("solve_right: F and H must share a source")
    B, Z, A = F.target, H.target, F.source
    Y = np.zeros((Z.rank, B.rank), dtype=np.int64)
    b = np.array(B.orders, dtype=np.int64)
    for row, z in enumerate(Z.orders):
        unk = np.gcd(b, z)
        u = z // unk
        # sum_k c_k u_k F_kj == H_rj (mod z) for each source factor j
        Fm = (F.matrix * u.reshape(-1, 1)).T
        c = solve_linear_mod(Fm, H.matrix[row, :], [z] * A.rank, [int(v) for v in unk])
        if c is None:
            return None
        Y[row, :] = (u * c) % z
    return ModuleMorphism(B, Z, Y)


# ---------------------------------------------------------------- subgroups


def _canonical_generators(gens: np.ndarray, orders: Sequence[int], ambient_orders) -> tuple[np.ndarray, list[int]]:
    """Re-express independent cyclic generators in invariant-factor form (descending)."""
    amb = np.array(ambient_orders, dtype=np.int64)
    by_prime: dict[int, list[tuple[int, np.ndarray]]] = {}
    for col, d in enumerate(orders):
        for p, a in factorize(int(d)):
            q = p**a
            by_prime.setdefault(p, []).append((q, gens[:, col] * (int(d) // q)))
    if not by_prime:
        return np.zeros((len(amb), 0), dtype=np.int64), []
    n = max(len(v) for v in by_prime.values())
    out_gens = [np.zeros(len(amb), dtype=np.int64) for _ in range(n)]
    out_orders = [1] * n
    for parts in by_prime.values():
        parts.sort(key=lambda e: -e[0])
        for k, (q, g) in enumerate(parts):
            out_gens[k] = out_gens[k] + g
            out_orders[k] *= q
    G = np.stack(out_gens, axis=1)
    if len(amb):
        G = G % amb.reshape(-1, 1)
    return G, out_orders


def subgroup(gens: np.ndarray, ambient: ZmModule) -> tuple[ZmModule, ModuleMorphism]:
    """The submodule generated by the columns of ``gens``, with its inclusion."""
    m = ambient.modulus
    if ambient.rank == 0:
        Z = ZmModule.zero(m)
        return Z, ModuleMorphism.zero(Z, ambient)
    G = np.asarray(gens, dtype=np.int64).reshape(ambient.rank, -1)
    if ambient.rank:
        G = G % ambient.order_array().reshape(-1, 1)
    k = G.shape[1]
    if k == 0 or not np.any(G):
        Z = ZmModule.zero(m)
        return Z, ModuleMorphism.zero(Z, ambient)
    R = kernel_mod(G, [m] * k, ambient.orders)  # relations among the generators
    D = diagonalize(R, m)
    Pinv = D.Pinv.astype(np.int64)
    new_gens, new_orders = [], []
    for i in range(k):
        di = int(D.d[i]) if i < len(D.d) else 0
        e = math.gcd(di, m)
        if e > 1:
            new_gens.append((G @ Pinv[:, i]) % ambient.order_array())
            new_orders.append(e)
    if not new_orders:
        Z = ZmModule.zero(m)
        return Z, ModuleMorphism.zero(Z, ambient)
    C, orders = _canonical_generators(np.stack(new_gens, axis=1), new_orders, ambient.orders)
    K = ZmModule(m, orders)
    return K, ModuleMorphism(K, ambient, C)


def kernel(f: ModuleMorphism) -> tuple[ZmModule, ModuleMorphism]:
    """``(K, incl)`` with ``incl`` a monomorphism onto ``{x : f(x) = 0}``."""
    gens = kernel_mod(f.matrix, f.source.orders, f.target.orders)
    return subgroup(gens, f.source)


def image(f: ModuleMorphism) -> tuple[ZmModule, ModuleMorphism]:
    return subgroup(f.matrix, f.target)


def cokernel(f: ModuleMorphism) -> tuple[ZmModule, ModuleMorphism]:
    """``(C, proj)`` with ``proj`` an epimorphism and ``ker(proj) = im(f)``."""
    N, m = f.target, f.target.modulus
    if N.rank == 0:
        return ZmModule.zero(m), ModuleMorphism.zero(N, ZmModule.zero(m))
    R = np.concatenate([f.matrix, np.diag(N.order_array())], axis=1)
    D = diagonalize(R, m)
    P = D.P.astype(np.int64)
    rows, orders = [], []
    for i in range(N.rank):
        di = int(D.d[i]) if i < len(D.d) else 0
        c = math.gcd(di, m)
        if c > 1:
            rows.append(P[i] % c)
            orders.append(c)
    if not orders:
        return ZmModule.zero(m), ModuleMorphism.zero(N, ZmModule.zero(m))
    C0 = ZmModule(m, orders)
    # ZmModule sorts orders descending; permute rows accordingly
    perm = sorted(range(len(orders)), key=lambda i: -orders[i])
    proj0 = ModuleMorphism(N, C0, np.stack([rows[i] for i in perm], axis=0))
    # move to invariant-factor generators
    gens, can = _canonical_generators(np.eye(C0.rank, dtype=np.int64), C0.orders, C0.orders)
    C = ZmModule(m, can)
    phi = ModuleMorphism(C, C0, gens)  # iso C -> C0
    psi = solve_left(phi, ModuleMorphism.identity(C0))
    assert psi is not None
    return C, psi @ proj0


def corestrict(f: ModuleMorphism, incl: ModuleMorphism) -> ModuleMorphism | None:
    """The factorization ``f = incl ∘ g`` (``incl`` mono), or None if ``im f ⊄ im incl``."""
    return solve_left(incl, f)


# ---------------------------------------------------------------- direct sums


@dataclass(frozen=True)
class Biproduct:
    summands: tuple[ZmModule, ...]
    module: ZmModule
    injections: tuple[ModuleMorphism, ...]
    projections: tuple[ModuleMorphism, ...]

    def from_blocks(self, other: "Biproduct", blocks) -> ModuleMorphism:
        """Map ``self.module -> other.module`` with block ``(a, b)``: summand b -> summand a."""
        total = ModuleMorphism.zero(self.module, other.module)
        for a, row in enumerate(blocks):
            for b, f in enumerate(row):
                if f is None:
                    continue
                total = total + other.injections[a] @ f @ self.projections[b]
        return total

    def map_into(self, maps: Sequence[ModuleMorphism]) -> ModuleMorphism:
        """``(f_a)``: Z -> ⊕ from components ``f_a: Z -> summand a``."""
        out = None
        for inj, f in zip(self.injections, maps):
            term = inj @ f
            out = term if out is None else out + term
        return out

    def map_out(self, maps: Sequence[ModuleMorphism]) -> ModuleMorphism:
        """``[f_a]``: ⊕ -> Z from components ``f_a: summand a -> Z``."""
        out = None
        for proj, f in zip(self.projections, maps):
            term = f @ proj
            out = term if out is None else out + term
        return out


def direct_sum(Ms: Sequence[ZmModule], modulus: int | None = None) -> Biproduct:
    Ms = tuple(Ms)
    m = _check_same_modulus(*Ms) if Ms else modulus
    if m is None:
        raise ValueError("direct_sum of an empty list needs a modulus")
    flat = [(d, a, i) for a, M in enumerate(Ms) for i, d in enumerate(M.orders)]
    order = sorted(range(len(flat)), key=lambda k: (-flat[k][0], k))
    S = ZmModule(m, [d for d, _, _ in flat])
    pos = {(flat[k][1], flat[k][2]): p for p, k in enumerate(order)}
    injs, projs = [], []
    for a, M in enumerate(Ms):
        E = np.zeros((S.rank, M.rank), dtype=np.int64)
        for i in range(M.rank):
            E[pos[(a, i)], i] = 1
        injs.append(ModuleMorphism(M, S, E, check=False))
        projs.append(ModuleMorphism(S, M, E.T.copy(), check=False))
    return Biproduct(Ms, S, tuple(injs), tuple(projs))


def direct_sum_maps(fs: Sequence[ModuleMorphism], modulus: int) -> ModuleMorphism:
    """Block-diagonal ``⊕ f_a`` between the direct sums of sources and targets."""
    S = direct_sum([f.source for f in fs], modulus)
    T = direct_sum([f.target for f in fs], modulus)
    return S.from_blocks(T, [[f if a == b else None for b in range(len(fs))] for a, f in enumerate(fs)])


# ---------------------------------------------------------------- decomposition / add


def decompose(presentation, modulus: int) -> ZmModule:
    """Canonical form of ``Z_m^r / (column span of presentation)``."""
    P = np.asarray(presentation, dtype=object)
    if P.ndim != 2:
        raise DimensionMismatch("presentation must be a matrix")
    r = P.shape[0]
    rows = [[int(x) for x in P[i]] + [modulus if i == j else 0 for j in range(r)] for i in range(r)]
    S = smith_normal_form(rows).S
    diag = S.diagonal()
    orders = [abs(d) for d in diag[:r] if abs(d) > 1]
    return ZmModule(modulus, invariant_factors(orders))


def is_in_add(M: ZmModule, gens: Sequence[ZmModule]) -> bool:
    """Whether ``M`` is a summand of a finite sum of the generators.

    Over Z/m indecomposables are the cyclic modules of prime-power order, so
    ``M`` is in add(gens) iff each prime-power part of ``M`` is a prime-power
    part of some generator.
    """
    _check_same_modulus(M, *gens)
    available = {q for G in gens for q in prime_power_parts(G.orders)}
    return all(q in available for q in prime_power_parts(M.orders))
