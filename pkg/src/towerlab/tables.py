"""Dense multiplication tables for small pc groups.

Element indices are the big-endian base-p reading of exponent vectors, as in
:meth:`PcPresentation.index`.
"""

from __future__ import annotations

import numpy as np

from .pcgroup import PcPresentation

MAX_TABLE_ORDER = 3**8


def multiplication_table(G: PcPresentation) -> np.ndarray:
    """``T[a, b] = index(a * b)``, built bottom-up along the pc series.

    With ``q = |N_{i+1}|``: ``(g_i^e t)(g_i^f s) = g_i^((e+f) mod p) c t^(g_i^f) s``
    where ``c`` is the power word of ``g_i`` on overflow and 1 otherwise.
    """
    if G.order > MAX_TABLE_ORDER:
        raise ValueError(f"group of order {G.order} is too large for a dense table")
    p, m = G.p, G.m
    dtype = np.int16 if G.order < 2**15 else np.int32
    T = np.zeros((1, 1), dtype=dtype)
    for i in range(m - 1, -1, -1):
        q = T.shape[0]
        # phi^f on N_{i+1} as index arrays
        phis = [np.arange(q, dtype=dtype)]
        phi1 = np.empty(q, dtype=dtype)
        for t in range(q):
            v = (0,) * (i + 1) + _digits(t, m - i - 1, p)
            img = G._conj(i, 1, v) if t else v
            phi1[t] = _sub_index(img, i + 1, p)
        for _ in range(1, p):
            phis.append(phi1[phis[-1]])
        w = _sub_index(G.power_rule(i), i + 1, p)
        new = np.empty((p * q, p * q), dtype=dtype)
        for e in range(p):
            for f in range(p):
                c = w if e + f >= p else 0
                rows = T[c, phis[f]]
                block = T[rows] + ((e + f) % p) * q
                new[e * q:(e + 1) * q, f * q:(f + 1) * q] = block
        T = new
    return T


def _digits(idx: int, n: int, p: int) -> tuple[int, ...]:
    out = [0] * n
    for k in range(n - 1, -1, -1):
        idx, out[k] = divmod(idx, p)
    return tuple(out)


def _sub_index(v, start: int, p: int) -> int:
    r = 0
    for e in v[start:]:
        r = r * p + e
    return r


def inverse_table(T: np.ndarray) -> np.ndarray:
    rows, cols = np.nonzero(T == 0)
    inv = np.empty(T.shape[0], dtype=T.dtype)
    inv[rows] = cols
    return inv


def power_table(T: np.ndarray, k: int) -> np.ndarray:
    """Index array of x -> x^k."""
    n = T.shape[0]
    idx = np.arange(n)
    res = np.zeros(n, dtype=np.int64)
    for _ in range(k):
        res = T[res, idx]
    return res


def element_orders(T: np.ndarray, p: int) -> np.ndarray:
    n = T.shape[0]
    orders = np.ones(n, dtype=np.int64)
    cur = np.arange(n)
    while (nontriv := cur != 0).any():
        orders[nontriv] *= p
        r = cur
        for _ in range(p - 1):
            r = T[r, cur]
        cur = r
    return orders
