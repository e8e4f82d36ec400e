"""Hot kernels: diagonalization of integer matrices over Z/m.

Every kernel is written once in numba-compatible numpy style. When numba is
importable and ``RELHOM_DISABLE_NUMBA`` is unset (or ``0``), the kernels are
compiled with ``@njit``; otherwise the same source runs as plain numpy code.
The uncompiled function is always reachable as ``<kernel>.py_func`` so the two
paths can be compared (see ``benchmarks/bench_kernels.py``).

Entries are kept reduced modulo ``m`` after every elementary operation, so
intermediate values never exceed ``m**2``; the compiled path therefore needs
``m < 2**31``. Larger moduli fall back to object arrays on the Python path.
"""

from __future__ import annotations

import os

INT64_SAFE_MODULUS = 2**31


def _numba_requested() -> bool:
    flag = os.environ.get("RELHOM_DISABLE_NUMBA", "0").strip().lower()
    return flag in ("", "0", "false", "no")


try:
    if not _numba_requested():
        raise ImportError("numba disabled by RELHOM_DISABLE_NUMBA")
    from numba import njit as _njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def _njit(*args, **kwargs):
        def wrap(fn):
            fn.py_func = fn
            return fn

        if args and callable(args[0]):
            return wrap(args[0])
        return wrap


@_njit(cache=True)
def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = a * 0 + 1, a * 0
    old_t, t = a * 0, a * 0 + 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@_njit(cache=True)
def _gcd(a, b):
    while b != 0:
        a, b = b, a % b
    return a if a >= 0 else -a


@_njit(cache=True)
def diagonalize_mod(A, m, P, Pinv, Q, Qinv):
    """Diagonalize ``A`` over Z/m in place.

    On return ``P @ A_in @ Q == diag(A_out) (mod m)``; ``P``/``Q`` are the
    accumulated row/column transforms (updated in place, pass identities) and
    ``Pinv``/``Qinv`` their inverses mod ``m``. Returns the number of pivots.
    """
    r, c = A.shape
    for i in range(r):
        for j in range(c):
            A[i, j] = A[i, j] % m
    k = 0
    lim = min(r, c)
    while k < lim:
        best_g = m + 1
        best_v = m + 1
        bi = -1
        bj = -1
        for i in range(k, r):
            for j in range(k, c):
                a = A[i, j]
                if a != 0:
                    g = _gcd(a, m)
                    if g < best_g or (g == best_g and a < best_v):
                        best_g = g
                        best_v = a
                        bi = i
                        bj = j
        if bi < 0:
            break
        if bi != k:
            for j in range(c):
                A[k, j], A[bi, j] = A[bi, j], A[k, j]
            for j in range(r):
                P[k, j], P[bi, j] = P[bi, j], P[k, j]
                Pinv[j, k], Pinv[j, bi] = Pinv[j, bi], Pinv[j, k]
        if bj != k:
            for i in range(r):
                A[i, k], A[i, bj] = A[i, bj], A[i, k]
            for i in range(c):
                Q[i, k], Q[i, bj] = Q[i, bj], Q[i, k]
                Qinv[k, i], Qinv[bj, i] = Qinv[bj, i], Qinv[k, i]
        while True:
            for i in range(k + 1, r):
                b = A[i, k]
                if b == 0:
                    continue
                a = A[k, k]
                if b % a == 0:
                    q = (b // a) % m
                    A[i, :] = (A[i, :] - q * A[k, :]) % m
                    P[i, :] = (P[i, :] - q * P[k, :]) % m
                    Pinv[:, k] = (Pinv[:, k] + q * Pinv[:, i]) % m
                else:
                    g, s, t = _xgcd(a, b)
                    s = s % m
                    t = t % m
                    u = (b // g) % m
                    v = (a // g) % m
                    rk = A[k, :].copy()
                    ri = A[i, :].copy()
                    A[k, :] = (s * rk + t * ri) % m
                    A[i, :] = (v * ri - u * rk) % m
                    pk = P[k, :].copy()
                    pi = P[i, :].copy()
                    P[k, :] = (s * pk + t * pi) % m
                    P[i, :] = (v * pi - u * pk) % m
                    ck = Pinv[:, k].copy()
                    ci = Pinv[:, i].copy()
                    Pinv[:, k] = (v * ck + u * ci) % m
                    Pinv[:, i] = (s * ci - t * ck) % m
            for j in range(k + 1, c):
                b = A[k, j]
                if b == 0:
                    continue
                a = A[k, k]
                if b % a == 0:
                    q = (b // a) % m
                    A[:, j] = (A[:, j] - q * A[:, k]) % m
                    Q[:, j] = (Q[:, j] - q * Q[:, k]) % m
                    Qinv[k, :] = (Qinv[k, :] + q * Qinv[j, :]) % m
                else:
                    g, s, t = _xgcd(a, b)
                    s = s % m
                    t = t % m
                    u = (b // g) % m
                    v = (a // g) % m
                    ck = A[:, k].copy()
                    cj = A[:, j].copy()
                    A[:, k] = (s * ck + t * cj) % m
                    A[:, j] = (v * cj - u * ck) % m
                    qk = Q[:, k].copy()
                    qj = Q[:, j].copy()
                    Q[:, k] = (s * qk + t * qj) % m
                    Q[:, j] = (v * qj - u * qk) % m
                    rk = Qinv[k, :].copy()
                    rj = Qinv[j, :].copy()
                    Qinv[k, :] = (v * rk + u * rj) % m
                    Qinv[j, :] = (s * rj - t * rk) % m
            clean = True
            for i in range(k + 1, r):
                if A[i, k] != 0:
                    clean = False
            for j in range(k + 1, c):
                if A[k, j] != 0:
                    clean = False
            if clean:
                break
        k += 1
    return k
