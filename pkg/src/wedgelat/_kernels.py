"""Integer hot loops: batched wedge squares and the exhaustive kernel search.

Each kernel has a numba ``@njit`` version and a pure-numpy version with the
same signature.  Set ``WEDGELAT_DISABLE_NUMBA=1`` to force numpy; numpy is
also used when numba cannot be imported.
"""

from __future__ import annotations

import os

import numpy as np

# basis order v12, v13, v14, v23, v24, v34 (0-based index pairs)
PAIRS = np.array([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], dtype=np.int64)

_DISABLED = os.environ.get("WEDGELAT_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy path


def wedge_square_batch_numpy(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H, dtype=np.int64)
    rows_k, rows_l = PAIRS[:, 0], PAIRS[:, 1]
    # W[..., (k,l), (i,j)] = H[k,i] H[l,j] - H[l,i] H[k,j]
    Hk = H[..., rows_k, :]
    Hl = H[..., rows_l, :]
    ci, cj = PAIRS[:, 0], PAIRS[:, 1]
    return Hk[..., :, ci] * Hl[..., :, cj] - Hl[..., :, ci] * Hk[..., :, cj]


def det4_batch_numpy(H: np.ndarray) -> np.ndarray:
    # Laplace along the top two rows: sum of sign * minor(0,1;I) * minor(2,3;J)
    H = np.asarray(H, dtype=np.int64)
    out = np.zeros(H.shape[:-2], dtype=np.int64)
    signs = (1, -1, 1, 1, -1, 1)
    for idx, (i, j) in enumerate(PAIRS):
        k, l = PAIRS[5 - idx]
        top = H[..., 0, i] * H[..., 1, j] - H[..., 0, j] * H[..., 1, i]
        bot = H[..., 2, k] * H[..., 3, l] - H[..., 2, l] * H[..., 3, k]
        out += signs[idx] * top * bot
    return out


def _all_columns(values: np.ndarray) -> np.ndarray:
    m = len(values)
    grid = np.stack(np.meshgrid(*([np.arange(m)] * 4), indexing="ij"), -1).reshape(-1, 4)
    return values[grid]


def kernel_search_numpy(values) -> np.ndarray:
    """All 4x4 matrices with entries in ``values`` whose wedge square is I_6.

    Full enumeration, vectorized over the last two columns for each choice
    of the first two.
    """
    values = np.asarray(values, dtype=np.int64)
    cols = _all_columns(values)  # (m^4, 4)
    n = len(cols)
    c3 = np.repeat(cols, n, axis=0)
    c4 = np.tile(cols, (n, 1))
    # minors of the (c3, c4) block and cross terms are evaluated per (c1, c2)
    m34 = c3[:, PAIRS[:, 0]] * c4[:, PAIRS[:, 1]] - c3[:, PAIRS[:, 1]] * c4[:, PAIRS[:, 0]]
    target = np.eye(6, dtype=np.int64)
    hits = []
    for a in range(n):
        c1 = cols[a]
        m13 = c1[PAIRS[:, 0]] * c3[:, PAIRS[:, 1]] - c3[:, PAIRS[:, 0]] * c1[PAIRS[:, 1]]
        m14 = c1[PAIRS[:, 0]] * c4[:, PAIRS[:, 1]] - c4[:, PAIRS[:, 0]] * c1[PAIRS[:, 1]]
        ok_1 = (
            np.all(m13 == target[:, 1], axis=1)
            & np.all(m14 == target[:, 2], axis=1)
            & np.all(m34 == target[:, 5], axis=1)
        )
        if not ok_1.any():
            continue
        for b in range(n):
            c2 = cols[b]
            m12 = c1[PAIRS[:, 0]] * c2[PAIRS[:, 1]] - c2[PAIRS[:, 0]] * c1[PAIRS[:, 1]]
            if not np.array_equal(m12, target[:, 0]):
                continue
            m23 = c2[PAIRS[:, 0]] * c3[:, PAIRS[:, 1]] - c3[:, PAIRS[:, 0]] * c2[PAIRS[:, 1]]
            m24 = c2[PAIRS[:, 0]] * c4[:, PAIRS[:, 1]] - c4[:, PAIRS[:, 0]] * c2[PAIRS[:, 1]]
            ok = ok_1 & np.all(m23 == target[:, 3], axis=1) & np.all(m24 == target[:, 4], axis=1)
            for r in np.nonzero(ok)[0]:
                hits.append(np.stack([c1, c2, c3[r], c4[r]], axis=1))
    if not hits:
        return np.zeros((0, 4, 4), dtype=np.int64)
    return np.array(hits, dtype=np.int64)


# ---------------------------------------------------------------------------
# numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _wedge_one(h, out):
        for a in range(6):
            k = PAIRS_T[a, 0]
            l = PAIRS_T[a, 1]
            for b in range(6):
                i = PAIRS_T[b, 0]
                j = PAIRS_T[b, 1]
                out[a, b] = h[k, i] * h[l, j] - h[l, i] * h[k, j]

    PAIRS_T = PAIRS.copy()

    @njit(cache=True)
    def _wedge_batch_nb(H):
        n = H.shape[0]
        out = np.empty((n, 6, 6), dtype=np.int64)
        for t in range(n):
            _wedge_one(H[t], out[t])
        return out

    @njit(cache=True)
    def _det4_batch_nb(H):
        n = H.shape[0]
        out = np.empty(n, dtype=np.int64)
        signs = (1, -1, 1, 1, -1, 1)
        for t in range(n):
            acc = 0
            for idx in range(6):
                i = PAIRS_T[idx, 0]
                j = PAIRS_T[idx, 1]
                k = PAIRS_T[5 - idx, 0]
                l = PAIRS_T[5 - idx, 1]
                top = H[t, 0, i] * H[t, 1, j] - H[t, 0, j] * H[t, 1, i]
                bot = H[t, 2, k] * H[t, 3, l] - H[t, 2, l] * H[t, 3, k]
                acc += signs[idx] * top * bot
            out[t] = acc
        return out

    @njit(cache=True)
    def _minor_ok(x, y, target_col):
        # the six 2x2 minors of the column pair (x, y) against column target_col of I_6
        for a in range(6):
            k = PAIRS_T[a, 0]
            l = PAIRS_T[a, 1]
            v = x[k] * y[l] - x[l] * y[k]
            if v != (1 if a == target_col else 0):
                return False
        return True

    @njit(cache=True)
    def _kernel_search_nb(values):
        m = values.shape[0]
        n = m**4
        cols = np.empty((n, 4), dtype=np.int64)
        for code in range(n):
            c = code
            for e in range(4):
                cols[code, e] = values[c % m]
                c //= m
        found = []
        # same visiting order as the numpy path: c1, then (c3, c4), then c2
        for a in range(n):
            c1 = cols[a]
            for r3 in range(n):
                c3 = cols[r3]
                if not _minor_ok(c1, c3, 1):
                    continue
                for r4 in range(n):
                    c4 = cols[r4]
                    if not _minor_ok(c1, c4, 2) or not _minor_ok(c3, c4, 5):
                        continue
                    for b in range(n):
                        c2 = cols[b]
                        if _minor_ok(c1, c2, 0) and _minor_ok(c2, c3, 3) and _minor_ok(c2, c4, 4):
                            h = np.empty((4, 4), dtype=np.int64)
                            h[:, 0] = c1
                            h[:, 1] = c2
                            h[:, 2] = c3
                            h[:, 3] = c4
                            found.append(h)
        out = np.empty((len(found), 4, 4), dtype=np.int64)
        for t in range(len(found)):
            out[t] = found[t]
        return out

    def wedge_square_batch_numba(H: np.ndarray) -> np.ndarray:
        H = np.ascontiguousarray(H, dtype=np.int64)
        flat = H.reshape(-1, 4, 4)
        return _wedge_batch_nb(flat).reshape(H.shape[:-2] + (6, 6))

    def det4_batch_numba(H: np.ndarray) -> np.ndarray:
        H = np.ascontiguousarray(H, dtype=np.int64)
        flat = H.reshape(-1, 4, 4)
        return _det4_batch_nb(flat).reshape(H.shape[:-2])

    def kernel_search_numba(values) -> np.ndarray:
        return _kernel_search_nb(np.asarray(values, dtype=np.int64))

    wedge_square_batch = wedge_square_batch_numba
    det4_batch = det4_batch_numba
    kernel_search = kernel_search_numba
else:
    wedge_square_batch = wedge_square_batch_numpy
    det4_batch = det4_batch_numpy
    kernel_search = kernel_search_numpy
