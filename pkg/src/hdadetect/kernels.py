"""Hot-loop kernels with a compiled implementation and a numpy fallback.

The compiled extension is used when it was built; otherwise the numpy version
is selected at import. ``HDADETECT_FORCE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _knn_py

try:
    if os.environ.get("HDADETECT_FORCE_PYTHON"):
        raise ImportError("fallback forced")
    from . import _knn_ext
except ImportError:
    _knn_ext = None

BACKEND = "compiled" if _knn_ext is not None else "python"


def knn_search(
    query: np.ndarray,
    reference: np.ndarray,
    k: int,
    query_ids: np.ndarray | None = None,
    reference_ids: np.ndarray | None = None,
    backend: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact Euclidean k-nearest-neighbour search.

    Args:
        query: ``(nq, p)`` query points.
        reference: ``(nr, p)`` reference points.
        k: Number of neighbours to return per query.
        query_ids, reference_ids: Optional integer ids; a reference row is
            skipped for a query row with the same id (self exclusion). When
            both are omitted and ``query is reference``, rows are matched by
            position.
        backend: ``"compiled"`` or ``"python"``; defaults to :data:`BACKEND`.

    Returns:
        ``(dist, idx)`` arrays of shape ``(nq, k)``, ascending in distance,
        ties ordered by reference index.
    """
    Q = np.ascontiguousarray(query, dtype=np.float64)
    R = np.ascontiguousarray(reference, dtype=np.float64)
    if Q.ndim != 2 or R.ndim != 2 or Q.shape[1] != R.shape[1]:
        raise ValueError(f"incompatible shapes {Q.shape} and {R.shape}")
    if query_ids is None and reference_ids is None and query is reference:
        query_ids = reference_ids = np.arange(len(Q))
    q_ids = (np.full(len(Q), -1) if query_ids is None else np.asarray(query_ids)).astype(np.int64)
    r_ids = (np.full(len(R), -2) if reference_ids is None else np.asarray(reference_ids)).astype(np.int64)
    available = len(R) - (1 if np.isin(q_ids, r_ids).any() else 0)
    if not 1 <= k <= available:
        raise ValueError(f"k={k} out of range for {len(R)} reference points")
    use = backend or BACKEND
    if use == "compiled":
        if _knn_ext is None:
            raise RuntimeError("compiled kernel is not available")
        return _knn_ext.knn_search(Q, R, int(k), np.ascontiguousarray(q_ids), np.ascontiguousarray(r_ids))
    if use != "python":
        raise ValueError(f"unknown backend {use!r}")
    return _knn_py.knn_search(Q, R, int(k), q_ids, r_ids)
