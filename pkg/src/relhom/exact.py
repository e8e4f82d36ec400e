"""Exact sequences with independently checkable node certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .complexes import Homology
from .linalg import solve_linear_mod
from .modules import ModuleMorphism, ZmModule, image
from .relative import ShortExactSequence


@dataclass(frozen=True)
class ExactnessCertificate:
    """Exactness of ``A -(a)-> B -(b)-> C`` at ``B``.

    ``b ∘ a = 0`` gives ``im a ⊆ ker b``; ``|im a| · |im b| = |B|`` gives
    ``|im a| = |ker b|``, hence equality. The matrices are embedded so the
    claim can be rechecked from the certificate alone.
    """

    node: int
    label: str
    node_orders: tuple[int, ...]
    incoming: tuple[tuple[int, ...], ...]
    incoming_source_orders: tuple[int, ...]
    outgoing: tuple[tuple[int, ...], ...]
    outgoing_target_orders: tuple[int, ...]
    composite_zero: bool
    image_in: int
    image_out: int
    size: int

    @property
    def ok(self) -> bool:
        return self.composite_zero and self.image_in * self.image_out == self.size

    def recheck(self, modulus: int) -> bool:
        """Recompute the certificate from the embedded matrices only."""
        B = ZmModule(modulus, self.node_orders)
        A = ZmModule(modulus, self.incoming_source_orders)
        C = ZmModule(modulus, self.outgoing_target_orders)
        a = ModuleMorphism(A, B, np.array(self.incoming, dtype=np.int64).reshape(B.rank, A.rank))
        b = ModuleMorphism(B, C, np.array(self.outgoing, dtype=np.int64).reshape(C.rank, B.rank))
        return (b @ a).is_zero() and image(a)[0].size * image(b)[0].size == B.size


def certify_node(node: int, label: str, a: ModuleMorphism, b: ModuleMorphism) -> ExactnessCertificate:
    B = a.target
    return ExactnessCertificate(
        node=node,
        label=label,
        node_orders=B.orders,
        incoming=tuple(tuple(int(x) for x in row) for row in a.matrix),
        incoming_source_orders=a.source.orders,
        outgoing=tuple(tuple(int(x) for x in row) for row in b.matrix),
        outgoing_target_orders=b.target.orders,
        composite_zero=(b @ a).is_zero(),
        image_in=image(a)[0].size,
        image_out=image(b)[0].size,
        size=B.size,
    )


@dataclass
class ExactSequence:
    """``terms[0] -> terms[1] -> ...`` with ``maps[i]: terms[i] -> terms[i+1]``."""

    modulus: int
    labels: list[str]
    terms: list[ZmModule]
    maps: list[ModuleMorphism]
    certificates: list[ExactnessCertificate] = field(default_factory=list)
    extra_checks: dict[str, bool] = field(default_factory=dict)

    def certify(self, nodes: list[int] | None = None) -> "ExactSequence":
        idx = range(1, len(self.terms) - 1) if nodes is None else nodes
        self.certificates = [certify_node(i, self.labels[i], self.maps[i - 1], self.maps[i]) for i in idx]
        return self

    @property
    def exact(self) -> bool:
        return all(c.ok for c in self.certificates)

    @property
    def all_checks_pass(self) -> bool:
        return self.exact and all(self.extra_checks.values())

    def groups(self) -> list[str]:
        return [str(T.group()) for T in self.terms]

    def index(self, label: str) -> int:
        return self.labels.index(label)


def preimage(f: ModuleMorphism, y) -> np.ndarray | None:
    """Some ``x`` with ``f(x) = y``, or None."""
    return solve_linear_mod(f.matrix, np.asarray(y, dtype=np.int64), f.target.orders, f.source.orders)


def connecting_map(ses: ShortExactSequence, n: int, HC: Homology, HA_next: Homology) -> ModuleMorphism:
    """Snake map ``H^n(C) -> H^{n+1}(A)``: lift a cycle, apply δ_B, pull back along i."""
    B = ses.i.target
    cols = []
    for z in HC.generators():
        x = preimage(ses.p[n], z)
        if x is None:  # pragma: no cover - p is degreewise onto
            raise ValueError(f"p^{n} is not onto")
        y = B.d(n).apply(x)
        a = preimage(ses.i[n + 1], y)
        if a is None:  # pragma: no cover - exactness of the rows
            raise ValueError(f"δ_B(lift) not in the image of i^{n + 1}")
        cols.append(HA_next.class_of(a))
    A = np.stack(cols, axis=1) if cols else np.zeros((HA_next.H.rank, 0), dtype=np.int64)
    return ModuleMorphism(HC.H, HA_next.H, A)


def long_exact_sequence(
    ses: ShortExactSequence,
    lo: int,
    hi: int,
    label: Callable[[str, int], str] | None = None,
    start_with_zero: bool = False,
) -> ExactSequence:
    """``H^lo(A) -> H^lo(B) -> H^lo(C) -> H^{lo+1}(A) -> ... -> H^hi(C) -> H^{hi+1}(A)``.

    Every interior node gets an exactness certificate. With
    ``start_with_zero`` a zero term is prepended so that injectivity of the
    first map is certified too.
    """
    label = label or (lambda kind, n: f"H{n}({kind})")
    A, B, C = ses.i.source, ses.i.target, ses.p.target
    m = A.modulus
    HA = {n: Homology(A, n) for n in range(lo, hi + 2)}
    HB = {n: Homology(B, n) for n in range(lo, hi + 1)}
    HCs = {n: Homology(C, n) for n in range(lo, hi + 1)}
    labels, terms, maps = [], [], []
    if start_with_zero:
        labels.append("0")
        terms.append(ZmModule.zero(m))
        maps.append(ModuleMorphism.zero(terms[0], HA[lo].H))
    for n in range(lo, hi + 1):
        labels += [label("A", n), label("B", n), label("C", n)]
        terms += [HA[n].H, HB[n].H, HCs[n].H]
        maps.append(HA[n].induced_map(ses.i[n], HB[n]))
        maps.append(HB[n].induced_map(ses.p[n], HCs[n]))
        maps.append(connecting_map(ses, n, HCs[n], HA[n + 1]))
    labels.append(label("A", hi + 1))
    terms.append(HA[hi + 1].H)
    return ExactSequence(m, labels, terms, maps).certify()
