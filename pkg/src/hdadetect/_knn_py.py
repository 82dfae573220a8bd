"""Pure numpy exact k-nearest-neighbour search (fallback for the compiled kernel)."""

from __future__ import annotations

import numpy as np

# cap on the number of distance cells held in memory per block
_BLOCK_CELLS = 4_000_000


def knn_search(
    Q: np.ndarray, R: np.ndarray, k: int, q_ids: np.ndarray, r_ids: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Return the ``k`` nearest reference rows for every query row.

    Reference rows whose id equals the query id are skipped. Ties in distance
    are broken by ascending reference index.

    Returns:
        ``(dist, idx)``, both of shape ``(len(Q), k)``, sorted by distance.
    """
    nq, p = Q.shape
    nr = R.shape[0]
    dist = np.empty((nq, k), dtype=np.float64)
    idx = np.empty((nq, k), dtype=np.int64)
    block = max(1, _BLOCK_CELLS // max(nr, 1))
    for start in range(0, nq, block):
        stop = min(nq, start + block)
        qb = Q[start:stop]
        d2 = np.zeros((stop - start, nr))
        # accumulate dimension by dimension: same summation order as the C loop
        for h in range(p):
            diff = qb[:, h, None] - R[None, :, h]
            d2 += diff * diff
        d2[q_ids[start:stop, None] == r_ids[None, :]] = np.inf
        if k < nr:
            kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
            rows, cols = np.nonzero(d2 <= kth[:, None])
        else:
            rows, cols = np.nonzero(np.ones_like(d2, dtype=bool))
        vals = d2[rows, cols]
        order = np.lexsort((cols, vals, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        # first k entries of every row
        first = np.searchsorted(rows, np.arange(stop - start))
        take = first[:, None] + np.arange(k)[None, :]
        dist[start:stop] = np.sqrt(vals[take])
        idx[start:stop] = cols[take]
    return dist, idx
