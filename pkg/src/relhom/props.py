"""Randomized property suite over all modules.

Every property is a function of a ``random.Random`` instance; each run gets
its own replay seed so a counterexample can be reproduced with
``run_property(name, replay_seed)``.
"""

from __future__ import annotations

import itertools
import random
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import complexes as _cx
from .cohomology import (
    classical_ext,
    relative_ext,
    tate_ext_complete,
    tate_ext_cone,
)
from .complexes import ChainMap, cone, homology, null_homotopy
from .linalg import kernel_mod, smith_normal_form, solve_linear_mod
from .modules import (
    ModuleMorphism,
    cokernel,
    decompose,
    direct_sum,
    hom_group,
    image,
    kernel,
)
from .random_objects import (
    random_complex,
    random_cycle_map,
    random_fraction,
    random_homotopy,
    random_module,
    random_morphism,
)
from .relative import (
    AtLeast,
    SubcatDescriptor,
    is_x_quasi_iso,
    lift_through,
    proper_resolution,
    reduce_fraction,
    resolve_complex,
    syzygy,
    verify_reduction,
    x_pd,
)

Outcome = tuple[bool, str]


def _snf_reconstruct(rng: random.Random) -> Outcome:
    r, c = rng.randint(1, 4), rng.randint(1, 4)
    A = [[rng.randint(-12, 12) for _ in range(c)] for _ in range(r)]
    res = smith_normal_form(A)
    diag = [abs(x) for x in res.S.diagonal()]
    chain = all(diag[i + 1] % diag[i] == 0 if diag[i] else diag[i + 1] == 0 for i in range(len(diag) - 1))
    ok = (res.U @ res.S @ res.V).tolist() == A and res.S.is_diagonal() and chain
    return ok, f"A={A}"


def _solve_brute(rng: random.Random) -> Outcome:
    n = rng.randint(1, 3)
    r = rng.randint(1, 3)
    m = rng.randint(2, 9)
    A = np.array([[rng.randrange(m) for _ in range(n)] for _ in range(r)], dtype=np.int64)
    b = np.array([rng.randrange(m) for _ in range(r)], dtype=np.int64)
    moduli = [m] * r
    sol = solve_linear_mod(A, b, moduli)
    exists = any(np.all((A @ np.array(x) - b) % m == 0) for x in itertools.product(range(m), repeat=n))
    if sol is None:
        return not exists, f"A={A.tolist()} b={b.tolist()} m={m}"
    return bool(np.all((A @ sol - b) % m == 0)), f"A={A.tolist()} b={b.tolist()} m={m}"


def _kernel_generates(rng: random.Random) -> Outcome:
    m = rng.choice([4, 6, 8, 9])
    n, r = rng.randint(1, 3), rng.randint(1, 2)
    A = np.array([[rng.randrange(m) for _ in range(n)] for _ in range(r)], dtype=np.int64)
    K = kernel_mod(A, [m] * n, [m] * r)
    if not np.all((A @ K) % m == 0):
        return False, f"A={A.tolist()} m={m}: generator outside kernel"
    span = {tuple(np.zeros(n, dtype=np.int64))}
    for j in range(K.shape[1]):
        span = {tuple((np.array(v) + t * K[:, j]) % m) for v in span for t in range(m)}
    true = {x for x in itertools.product(range(m), repeat=n) if np.all((A @ np.array(x)) % m == 0)}
    return span == true, f"A={A.tolist()} m={m}"


def _biproduct(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9, 12])
    Ms = [random_module(rng, m, 2) for _ in range(rng.randint(1, 3))]
    B = direct_sum(Ms, m)
    ok = True
    for i, j in itertools.product(range(len(Ms)), repeat=2):
        e = B.projections[i] @ B.injections[j]
        want = ModuleMorphism.identity(Ms[i]) if i == j else ModuleMorphism.zero(Ms[j], Ms[i])
        ok &= e == want
    total = ModuleMorphism.zero(B.module, B.module)
    for i in range(len(Ms)):
        total = total + B.injections[i] @ B.projections[i]
    ok &= total == ModuleMorphism.identity(B.module)
    return ok, f"summands={[M.orders for M in Ms]} m={m}"


def _order_equations(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9, 12])
    M, N = random_module(rng, m, 3), random_module(rng, m, 3)
    f = random_morphism(rng, M, N)
    K, _ = kernel(f)
    I, _ = image(f)
    C, _ = cokernel(f)
    ok = M.size == K.size * I.size and C.size * I.size == N.size
    return ok, f"f={f!r}"


def _decompose_idempotent(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9, 12])
    M = random_module(rng, m, 3)
    P = np.diag(list(M.orders)).reshape(M.rank, M.rank)
    D1 = decompose(P, m)
    P2 = np.diag(list(D1.orders)).reshape(D1.rank, D1.rank)
    D2 = decompose(P2, m)
    return D1 == D2 and D1.is_isomorphic(M), f"M={M.orders} m={m}"


def _hom_count(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    M, N = random_module(rng, m, 2), random_module(rng, m, 2)
    if M.size > 16 or N.size > 16:
        return True, "skipped (too large)"
    G, _ = hom_group(M, N)
    count = 0
    for cols in itertools.product(list(N.elements()), repeat=M.rank):
        A = np.stack(cols, axis=1) if cols else np.zeros((N.rank, 0), dtype=np.int64)
        count += all(np.all((d * A[:, j]) % N.order_array() == 0) for j, d in enumerate(M.orders))
    return G.order == count, f"M={M.orders} N={N.orders} m={m}"


def _shift_inverse(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    X = random_complex(rng, m, -2, 1, 2)
    k = rng.randint(1, 3)
    Y = _cx.shift(_cx.shift(X, -k), k)
    return Y == X, f"X={X!r} k={k}"


def _shift_additive(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    X = random_complex(rng, m, -2, 1, 2)
    a, b = rng.randint(-2, 2), rng.randint(-2, 2)
    return _cx.shift(_cx.shift(X, a), b) == _cx.shift(X, a + b), f"X={X!r} a={a} b={b}"


def _shift_homology(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    X = random_complex(rng, m, -2, 1, 2)
    k = rng.randint(-2, 2)
    S = _cx.shift(X, k)
    ok = all(homology(S, n) == homology(X, n + k) for n in range(-4, 4))
    return ok, f"X={X!r} k={k}"


def _cone_id_contractible(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    X = random_complex(rng, m, -2, 1, 2)
    C = cone(ChainMap.identity(X)).complex
    return null_homotopy(ChainMap.identity(C)) is not None, f"X={X!r}"


def _resolution_proper(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    X = rng.choice([SubcatDescriptor.PROJ(m), SubcatDescriptor.GP(m)])
    M = random_module(rng, m, 2)
    res = proper_resolution(M, X, 5)
    checks = res.verify()
    return all(checks.values()), f"M={M.orders} X={X.name} m={m} failed={[k for k, v in checks.items() if not v]}"


def _resolve_complex(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    X = SubcatDescriptor.GP(m)
    T = random_complex(rng, m, -rng.randint(0, 3), 0, 2)
    R = resolve_complex(T, X, 6)
    post = R.postconditions(X)
    return all(post.values()), f"T={T!r} failed={[k for k, v in post.items() if not v]}"


def _lift_identities(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    X = SubcatDescriptor.GP(m)
    T = random_complex(rng, m, -rng.randint(0, 2), 0, 2)
    R = resolve_complex(T, X, 6)
    P = random_complex(rng, m, -2, 0, 2, X)
    a = random_cycle_map(rng, P, T)
    beta = lift_through(R.alpha, a, X)
    ok = (R.alpha @ beta) == a and not beta.failures()
    return ok, f"T={T!r} P={P!r}"


def _density(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    X = SubcatDescriptor.GP(m)
    T = random_complex(rng, m, -rng.randint(0, 3), 0, 2)
    R = resolve_complex(T, X, 6)
    lo, hi = R.window
    return is_x_quasi_iso(R.alpha, X, range(lo - 1, hi + 1)), f"T={T!r}"


def _fraction_witnesses(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    X = SubcatDescriptor.GP(m)
    fr, _, _ = random_fraction(rng, X)
    red, g = reduce_fraction(fr, X)
    v = verify_reduction(fr, red, g)
    return all(v.values()), f"roof={fr.roof!r}"


def _faithfulness(rng: random.Random) -> Outcome:
    """``f = f' ∘ s`` with ``f'`` null-homotopic reduces to a null-homotopic map."""
    m = rng.choice([4, 8, 9])
    X = SubcatDescriptor.GP(m)
    fr, D, S = random_fraction(rng, X)
    fprime = random_homotopy(rng, D, S).boundary()
    f = fprime @ fr.s
    red, _ = reduce_fraction(type(fr)(fr.roof, fr.s, f), X)
    return null_homotopy(red) is not None, f"D={D!r} S={S!r}"


def _classical_agreement(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    M, N = random_module(rng, m, 2), random_module(rng, m, 2)
    n = rng.randint(0, 3)
    P = SubcatDescriptor.PROJ(m)
    return relative_ext(M, N, n, P, 6) == classical_ext(M, N, n), f"M={M.orders} N={N.orders} n={n} m={m}"


def _dimension_shift(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    X = rng.choice([SubcatDescriptor.PROJ(m), SubcatDescriptor.GP(m)])
    M, N = random_module(rng, m, 2), random_module(rng, m, 2)
    n = rng.randint(2, 4)
    ok = relative_ext(M, N, n, X, 7) == relative_ext(syzygy(M, X), N, n - 1, X, 7)
    return ok, f"M={M.orders} N={N.orders} n={n} X={X.name} m={m}"


def _vanishing(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    X = rng.choice([SubcatDescriptor.PROJ(m), SubcatDescriptor.GP(m)])
    M, N = random_module(rng, m, 2), random_module(rng, m, 2)
    d = x_pd(M, X, 6)
    if isinstance(d, AtLeast):
        return True, "infinite pd"
    ok = all(relative_ext(M, N, n, X, 8).is_trivial() for n in range(d + 1, d + 3))
    return ok, f"M={M.orders} N={N.orders} d={d} X={X.name} m={m}"


def _tate_routes(rng: random.Random) -> Outcome:
    m = rng.choice([4, 8, 9])
    M, N = random_module(rng, m, 2), random_module(rng, m, 2)
    n = rng.randint(1, 4)
    a = tate_ext_complete(M, N, n)
    b = tate_ext_cone(M, N, n, SubcatDescriptor.GP(m), SubcatDescriptor.PROJ(m), 7)
    return a == b, f"M={M.orders} N={N.orders} n={n} m={m}"


PROPERTIES: dict[str, Callable[[random.Random], Outcome]] = {
    "linalg.snf_reconstruct": _snf_reconstruct,
    "linalg.solve_vs_brute_force": _solve_brute,
    "linalg.kernel_generates": _kernel_generates,
    "modules.biproduct_identities": _biproduct,
    "modules.order_equations": _order_equations,
    "modules.decompose_idempotent": _decompose_idempotent,
    "modules.hom_count": _hom_count,
    "complexes.shift_inverse": _shift_inverse,
    "complexes.shift_additive": _shift_additive,
    "complexes.shift_homology": _shift_homology,
    "complexes.cone_id_contractible": _cone_id_contractible,
    "relative.resolution_proper": _resolution_proper,
    "relative.resolve_complex_postconditions": _resolve_complex,
    "relative.lift_through_identities": _lift_identities,
    "relative.density_witness": _density,
    "relative.fraction_witnesses": _fraction_witnesses,
    "relative.faithfulness_witness": _faithfulness,
    "cohomology.classical_agreement": _classical_agreement,
    "cohomology.dimension_shift": _dimension_shift,
    "cohomology.vanishing_above_pd": _vanishing,
    "cohomology.tate_route_agreement": _tate_routes,
}


def replay_seed(seed: int, name: str, i: int) -> int:
    return (seed * 1_000_003 + zlib.crc32(name.encode()) + i) % 2**32


def run_property(name: str, replay: int) -> Outcome:
    """Run one instance of a property from its replay seed."""
    try:
        return PROPERTIES[name](random.Random(replay))
    except Exception as exc:  # a crash is a counterexample, not a suite abort
        return False, f"raised {type(exc).__name__}: {exc}"


@dataclass
class PropResult:
    runs: int = 0
    passed: int = 0
    counterexample: dict | None = None

    def to_json(self) -> dict:
        return {"runs": self.runs, "passed": self.passed, "failed": self.runs - self.passed, "counterexample": self.counterexample}


@dataclass
class PropReport:
    seed: int
    budget: int
    results: dict[str, PropResult] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.passed == r.runs for r in self.results.values())

    def failures(self) -> list[str]:
        return [k for k, r in self.results.items() if r.passed != r.runs]

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "budget": self.budget,
            "ok": self.ok,
            "properties": {k: r.to_json() for k, r in sorted(self.results.items())},
        }

    def text(self) -> str:
        if not self.results:
            return f"prop suite: seed {self.seed}, budget {self.budget}: no properties run\n"
        lines = [f"prop suite: seed {self.seed}, budget {self.budget}"]
        for k, r in sorted(self.results.items()):
            mark = "PASS" if r.passed == r.runs else "FAIL"
            lines.append(f"  {mark} {k}: {r.passed}/{r.runs}")
            if r.counterexample:
                lines.append(f"       replay_seed={r.counterexample['replay_seed']} {r.counterexample['detail']}")
        return "\n".join(lines) + "\n"


def prop_suite(seed: int, budget: int, names: list[str] | None = None) -> PropReport:
    """Run every property ``budget`` times (``budget == 0`` gives an empty report)."""
    report = PropReport(seed, budget)
    if budget <= 0:
        return report
    for name in names or list(PROPERTIES):
        res = PropResult()
        for i in range(budget):
            rs = replay_seed(seed, name, i)
            ok, detail = run_property(name, rs)
            res.runs += 1
            if ok:
                res.passed += 1
            elif res.counterexample is None:
                res.counterexample = {"replay_seed": rs, "detail": detail}
        report.results[name] = res
    return report
