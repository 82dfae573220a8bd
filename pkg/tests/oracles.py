"""Slow, loop-based reference implementations used as test oracles.

They are written from the definitions, independently of the package code.
"""

import math
from collections import Counter


def pairwise(points):
    n = len(points)
    return [[math.dist(points[i], points[j]) for j in range(n)] for i in range(n)]


def neighbours(D, i, k):
    """The ``k`` nearest other cases of ``i`` as (distance, index), ties by index."""
    others = sorted((D[i][j], j) for j in range(len(D)) if j != i)
    return others[:k]


def knn_agg_raw(points, k_min, k_max):
    D = pairwise(points)
    return [sum(d for d, _ in neighbours(D, i, k_max)[k_min - 1 : k_max]) for i in range(len(D))]


def lof_raw(points, min_pts):
    D = pairwise(points)
    n = len(D)
    nb = [neighbours(D, i, min_pts) for i in range(n)]
    kdist = [nb[i][-1][0] for i in range(n)]
    reach = [[max(kdist[j], d) for d, j in nb[i]] for i in range(n)]
    positive = [r for row in reach for r in row if r > 0]
    eps = min(positive) if positive else 1.0
    lrd = []
    for i in range(n):
        m = sum(reach[i]) / min_pts
        lrd.append(1.0 / m if m > 0 else 1.0 / eps)
    return [sum(lrd[j] for _, j in nb[i]) / min_pts / lrd[i] for i in range(n)]


def equiwidth_bin(x, values, b):
    lo, hi = min(values), max(values)
    if hi == lo:
        return 1
    width = (hi - lo) / b
    for j in range(1, b):
        if x < lo + j * width:
            return j
    return b


def equidepth_bins(values, b):
    n = len(values)
    order = sorted(range(n), key=lambda i: (values[i], i))
    out = [0] * n
    for r, i in enumerate(order, start=1):
        out[i] = math.ceil(r * b / n)
    return out


def secoda_scores(numeric, categorical, mode="equiwidth", b_max=None):
    """Straight-line SECODA loop: running mean of constellation counts.

    ``numeric`` and ``categorical`` are lists of columns. Returns
    ``(scores, ultimate_arity)``.
    """
    n = len((numeric or categorical)[0])
    p = len(numeric)
    if b_max is None:
        r = 1
        while r**p < n:
            r += 1
        b_max = 4 * r if p else 1
    total = [0.0] * n
    b = 0
    while True:
        b += 1
        if mode == "equiwidth":
            bins = [[equiwidth_bin(x, col, b) for x in col] for col in numeric]
        else:
            bins = [equidepth_bins(col, b) for col in numeric]
        keys = [tuple(c[i] for c in bins) + tuple(c[i] for c in categorical) for i in range(n)]
        counts = Counter(keys)
        freq = [counts[k] for k in keys]
        total = [t + f for t, f in zip(total, freq)]
        if b >= b_max or all(f == 1 for f in freq):
            break
    return [t / b for t in total], b


def mann_whitney_auc(scores, labels):
    """Fraction of (positive, negative) pairs where the positive scores lower."""
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    wins = 0.0
    for a in pos:
        for b in neg:
            wins += 1.0 if a < b else 0.5 if a == b else 0.0
    return wins / (len(pos) * len(neg))


def youden_sweep(scores, labels):
    """Best ``J`` over every threshold that changes the prediction set."""
    vals = sorted(set(scores))
    cands = [vals[0] - 1] + [(a + b) / 2 for a, b in zip(vals, vals[1:])] + [vals[-1] + 1]
    P = sum(labels)
    N = len(labels) - P
    best = -1.0
    for t in cands:
        tp = sum(1 for s, y in zip(scores, labels) if y and s < t)
        tn = sum(1 for s, y in zip(scores, labels) if not y and s >= t)
        best = max(best, tp / P + tn / N - 1)
    return best
