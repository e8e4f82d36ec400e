"""Exact linear algebra over Z and Z/m.

``smith_normal_form`` works over the integers with Python's arbitrary
precision ints. The modular solvers (``solve_linear_mod``, ``kernel_mod``)
rescale every congruence to a common modulus ``L`` and diagonalize over Z/L
with :func:`relhom._kernels.diagonalize_mod`, which keeps entries bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import DimensionMismatch


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix, row-major, arbitrary precision entries."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise DimensionMismatch("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def coerce(cls, A) -> "IntMatrix":
        if isinstance(A, IntMatrix):
            return A
        if isinstance(A, np.ndarray):
            if A.ndim != 2:
                raise DimensionMismatch("expected a 2-D array")
            return cls(A.shape[0], A.shape[1], tuple(int(x) for x in A.reshape(-1)))
        return cls.from_rows(A)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def tolist(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        a, b = self.tolist(), other.tolist()
        out = [
            [sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
            for i in range(self.rows)
        ]
        return IntMatrix.from_rows(out, other.cols)

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def diagonal(self) -> list[int]:
        return [self[i, i] for i in range(min(self.rows, self.cols))]


@dataclass(frozen=True)
class SnfResult:
    """``A == U @ S @ V`` with U, V unimodular and S in Smith form.

    ``P`` and ``Q`` are the inverses of ``U`` and ``V`` (so ``P @ A @ Q == S``).
    """

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    P: IntMatrix
    Q: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.S.diagonal() if d != 0)


def _eye(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(A) -> SnfResult:
    """Smith normal form over Z by smallest-pivot row/column reduction."""
    A = IntMatrix.coerce(A)
    r, c = A.rows, A.cols
    M = A.tolist()
    P, Pinv, Q, Qinv = _eye(r), _eye(r), _eye(c), _eye(c)

    def row_sub(i, t, q):  # row_i -= q * row_t
        if q == 0:
            return
        M[i] = [x - q * y for x, y in zip(M[i], M[t])]
        P[i] = [x - q * y for x, y in zip(P[i], P[t])]
        for row in Pinv:
            row[t] += q * row[i]

    def col_sub(j, t, q):  # col_j -= q * col_t
        if q == 0:
            return
        for row in M:
            row[j] -= q * row[t]
        for row in Q:
            row[j] -= q * row[t]
        Qinv[t] = [x + q * y for x, y in zip(Qinv[t], Qinv[j])]

    def row_swap(i, j):
        if i == j:
            return
        M[i], M[j] = M[j], M[i]
        P[i], P[j] = P[j], P[i]
        for row in Pinv:
            row[i], row[j] = row[j], row[i]

    def col_swap(i, j):
        if i == j:
            return
        for mat in (M, Q):
            for row in mat:
                row[i], row[j] = row[j], row[i]
        Qinv[i], Qinv[j] = Qinv[j], Qinv[i]

    t = 0
    while t < min(r, c):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if M[i][j] != 0 and (best is None or abs(M[i][j]) < abs(M[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        row_swap(t, best[0])
        col_swap(t, best[1])
        while True:
            p = M[t][t]
            for i in range(t + 1, r):
                row_sub(i, t, M[i][t] // p)
            for j in range(t + 1, c):
                col_sub(j, t, M[t][j] // p)
            rest = [(abs(M[i][t]), i, None) for i in range(t + 1, r) if M[i][t] != 0]
            rest += [(abs(M[t][j]), None, j) for j in range(t + 1, c) if M[t][j] != 0]
            if rest:
                _, i, j = min(rest, key=lambda e: e[0])
                if i is not None:
                    row_swap(t, i)
                else:
                    col_swap(t, j)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if M[i][j] % p != 0),
                None,
            )
            if bad is None:
                break
            # pull the offending row into the pivot row; the next pass shrinks the pivot
            i = bad[0]
            M[t] = [x + y for x, y in zip(M[t], M[i])]
            P[t] = [x + y for x, y in zip(P[t], P[i])]
            for row in Pinv:
                row[i] -= row[t]
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            P[t] = [-x for x in P[t]]
            for row in Pinv:
                row[t] = -row[t]
        t += 1

    return SnfResult(
        U=IntMatrix.from_rows(Pinv, r),
        S=IntMatrix.from_rows(M, c),
        V=IntMatrix.from_rows(Qinv, c),
        P=IntMatrix.from_rows(P, r),
        Q=IntMatrix.from_rows(Q, c),
    )


def integer_kernel(A) -> list[list[int]]:
    """Basis of ``{x in Z^n : A x = 0}`` as a list of vectors."""
    A = IntMatrix.coerce(A)
    snf = smith_normal_form(A)
    Q = snf.Q.tolist()
    return [[Q[i][j] for i in range(A.cols)] for j in range(snf.rank, A.cols)]


def lcm(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


@dataclass(frozen=True)
class ModDiagonalization:
    """``P @ A @ Q == diag(d) (mod modulus)`` with P, Q invertible mod modulus."""

    modulus: int
    d: np.ndarray
    P: np.ndarray
    Pinv: np.ndarray
    Q: np.ndarray
    Qinv: np.ndarray

    def pivot_gcds(self) -> list[int]:
        """``gcd(d_i, modulus)`` per row of the diagonal (``modulus`` for empty rows)."""
        rows = self.P.shape[0]
        out = []
        for i in range(rows):
            di = int(self.d[i]) if i < len(self.d) else 0
            out.append(math.gcd(di, self.modulus))
        return out


def _dtype_for(modulus: int):
    return np.int64 if modulus < _kernels.INT64_SAFE_MODULUS else object


def diagonalize(A: np.ndarray, modulus: int) -> ModDiagonalization:
    A = np.asarray(A)
    if A.ndim != 2:
        raise DimensionMismatch("expected a 2-D matrix")
    r, c = A.shape
    dtype = _dtype_for(modulus)
    work = np.array(A, dtype=object) % modulus
    work = work.astype(dtype)
    P, Pinv = np.eye(r, dtype=np.int64).astype(dtype), np.eye(r, dtype=np.int64).astype(dtype)
    Q, Qinv = np.eye(c, dtype=np.int64).astype(dtype), np.eye(c, dtype=np.int64).astype(dtype)
    fn = _kernels.diagonalize_mod if dtype is np.int64 else _kernels.diagonalize_mod.py_func
    if r and c:
        fn(work, dtype(modulus) if dtype is np.int64 else modulus, P, Pinv, Q, Qinv)
    d = np.array([work[i, i] for i in range(min(r, c))], dtype=dtype)
    return ModDiagonalization(modulus, d, P, Pinv, Q, Qinv)


def _rescale(A, b, moduli, unknown_orders):
    A = np.asarray(A, dtype=object)
    if A.ndim == 1:
        A = A.reshape(len(moduli), -1) if len(moduli) else A.reshape(0, 0)
    moduli = [int(t) for t in moduli]
    if A.shape[0] != len(moduli):
        raise DimensionMismatch(f"{A.shape[0]} rows but {len(moduli)} moduli")
    if unknown_orders is not None and len(unknown_orders) != A.shape[1]:
        raise DimensionMismatch(f"{A.shape[1]} unknowns but {len(unknown_orders)} orders")
    if b is not None and len(b) != len(moduli):
        raise DimensionMismatch(f"{len(b)} right-hand sides but {len(moduli)} moduli")
    if any(t < 1 for t in moduli):
        raise ValueError("moduli must be positive")
    L = lcm(moduli + [int(s) for s in (unknown_orders or [])])
    scale = np.array([L // t for t in moduli], dtype=object).reshape(-1, 1)
    As = (A * scale) % L if A.size else A
    bs = None
    if b is not None:
        bs = (np.array([int(x) for x in b], dtype=object) * scale.reshape(-1)) % L
    return As, bs, L


def solve_linear_mod(A, b, moduli, unknown_orders=None):
    """Find x with ``A @ x == b`` row-wise modulo ``moduli``; None if unsolvable.

    Row ``i`` is read modulo ``moduli[i]``. ``unknown_orders`` (optional) gives
    the cyclic order of each unknown; the returned vector is reduced into it.
    The particular solution returned has all free diagonal coordinates zero,
    which makes the output deterministic.
    """
    As, bs, L = _rescale(A, b, moduli, unknown_orders)
    r, n = As.shape
    if r == 0:
        return np.zeros(n, dtype=np.int64)
    D = diagonalize(As, L)
    c = (D.P.astype(object) @ bs) % L
    y = [0] * n
    for i in range(r):
        di = int(D.d[i]) if i < len(D.d) else 0
        ci = int(c[i])
        if di == 0:
            if ci % L != 0:
                return None
            continue
        g = math.gcd(di, L)
        if ci % g:
            return None
        mod = L // g
        y[i] = (ci // g) * pow(di // g, -1, mod) % mod if mod > 1 else 0
    x = (D.Q.astype(object) @ np.array(y, dtype=object)) % L if n else np.zeros(0, dtype=object)
    if unknown_orders is not None:
        x = np.array([int(v) % int(s) for v, s in zip(x, unknown_orders)], dtype=object)
    return np.array([int(v) for v in x], dtype=np.int64)


def kernel_mod(A, source_orders, target_orders) -> np.ndarray:
    """Generators of ``{x mod source_orders : A x == 0 mod target_orders}``.

    Returned as the columns of an ``n x k`` int64 array (``k`` may be 0).
    """
    source_orders = [int(s) for s in source_orders]
    As, _, L = _rescale(A, None, target_orders, source_orders)
    r, n = As.shape
    if n != len(source_orders):
        raise DimensionMismatch(f"{n} columns but {len(source_orders)} source orders")
    if r == 0:
        cols = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    else:
        D = diagonalize(As, L)
        cols = []
        for i in range(n):
            di = int(D.d[i]) if i < len(D.d) else 0
            step = L // math.gcd(di, L) if di else 1
            if step == L:
                continue
            cols.append([int(v) * step for v in D.Q[:, i]])
    out = []
    seen = set()
    for col in cols:
        red = tuple(v % s for v, s in zip(col, source_orders))
        if any(red) and red not in seen:
            seen.add(red)
            out.append(red)
    if not out:
        return np.zeros((n, 0), dtype=np.int64)
    return np.array(out, dtype=np.int64).T
