"""Discretization-based density detector for mixed data (SECODA style).

Each iteration bins every numeric column into ``b`` bins, groups cases by
their full constellation of bin ids and class values, and records how many
cases share each constellation. A case's score is the running arithmetic mean
of those frequencies over iterations ``b = 1, 2, ...``, so rare constellations
(low scores) are anomalous. The loop stops once every constellation is unique
or ``b`` reaches ``b_max``. There is no pruning: every case is rescored in
every iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, ScoreVector

EQUIWIDTH = "equiwidth"
EQUIDEPTH = "equidepth"


@dataclass(frozen=True)
class SecodaResult:
    scores: ScoreVector
    ultimate_arity: int
    # mean constellation frequency per case at the final arity
    final_frequencies: np.ndarray


def discretize(values, b: int, mode: str = EQUIWIDTH) -> np.ndarray:
    """Assign 1-based bin ids to a numeric column.

    Equiwidth bins split ``[min, max]`` into ``b`` equal intervals; a value
    on an edge falls into the higher bin and the maximum into bin ``b``.
    Equidepth bins hold the cases whose rank (by value, then position) lies
    in ``((j-1) n/b, j n/b]``.
    """
    x = np.asarray(values, dtype=np.float64)
    if b < 1:
        raise ValueError(f"bin count must be >= 1, got {b}")
    if x.size == 0:
        raise ValueError("cannot discretize an empty column")
    n = x.size
    if mode == EQUIWIDTH:
        lo, hi = x.min(), x.max()
        if hi == lo:
            return np.ones(n, dtype=np.int64)
        bins = np.floor((x - lo) * b / (hi - lo)).astype(np.int64) + 1
        return np.minimum(bins, b)
    if mode == EQUIDEPTH:
        order = np.lexsort((np.arange(n), x))
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(1, n + 1)
        return (rank * b + n - 1) // n
    raise ValueError(f"unknown discretization mode {mode!r}")


def _group_codes(columns: list[np.ndarray], n: int) -> np.ndarray:
    """Compact integer id per distinct row of the given code columns."""
    key = np.zeros(n, dtype=np.int64)
    for col in columns:
        _, col_codes = np.unique(col, return_inverse=True)
        width = int(col_codes.max()) + 1
        _, key = np.unique(key * width + col_codes.ravel(), return_inverse=True)
        key = key.ravel()
    return key


def constellation_frequencies(codes: list[np.ndarray], n: int) -> np.ndarray:
    """Number of cases sharing each case's constellation."""
    key = _group_codes(codes, n)
    return np.bincount(key)[key].astype(np.float64)


def _ceil_root(n: int, p: int) -> int:
    r = max(1, int(round(n ** (1.0 / p))))
    while r**p < n:
        r += 1
    while r > 1 and (r - 1) ** p >= n:
        r -= 1
    return r


def default_b_max(n: int, p_c: int) -> int:
    """``4 * ceil(n ** (1 / p_c))``, computed with integer arithmetic."""
    if p_c == 0:
        return 1
    return 4 * _ceil_root(n, p_c)


def secoda(ds: Dataset, mode: str = EQUIWIDTH, b_max: int | None = None) -> SecodaResult:
    """Score every case by its mean constellation frequency across arities."""
    n = ds.n_cases
    numeric = [c.values.astype(np.float64) for c in ds.numeric_columns]
    cats = [c.values for c in ds.categorical_columns]
    p_c = len(numeric)
    cap = default_b_max(n, p_c) if b_max is None else int(b_max)
    if cap < 1:
        raise ValueError(f"b_max must be >= 1, got {cap}")
    if p_c == 0:
        cap = 1
    cat_codes = [np.unique(c, return_inverse=True)[1].ravel() for c in cats]

    total = np.zeros(n)
    b = 0
    freq = np.full(n, float(n))
    while True:
        b += 1
        codes = [discretize(col, b, mode) for col in numeric] + cat_codes
        freq = constellation_frequencies(codes, n) if codes else np.full(n, float(n))
        total += freq
        if b >= cap or np.all(freq == 1):
            break
    scores = ScoreVector(total / b, role="secoda", meta={"ultimate_arity": b, "mode": mode})
    return SecodaResult(scores=scores, ultimate_arity=b, final_frequencies=freq)
