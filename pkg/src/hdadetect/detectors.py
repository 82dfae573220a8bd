"""General-purpose anomaly detectors adapted to the canonical orientation.

All distance-based detectors work on an :class:`~hdadetect.core.EncodedMatrix`
and negate their raw outlyingness, so the most outlying case gets the lowest
score.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .core import Dataset, DatasetError, EncodedMatrix, ScoreVector, continuous_view, encode
from .kernels import knn_search
from .secoda import EQUIDEPTH, EQUIWIDTH, secoda

logger = logging.getLogger(__name__)

KNN_AGG = "knn_agg"
QSP = "qsp"
LOF = "lof"
SECODA = "secoda"
ALGORITHMS = (KNN_AGG, QSP, LOF, SECODA)

FULL = "full"
CONTINUOUS = "continuous"


def normalize_algorithm(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    if key not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")
    return key


@dataclass(frozen=True)
class DetectorSpec:
    """Choice of underlying detector and its parameters.

    ``sample_size=None`` means ``min(3000, n)`` for QSP.
    """

    algorithm: str = KNN_AGG
    k_min: int = 1
    k_max: int = 10
    min_pts: int = 10
    sample_size: int | None = None
    seed: int = 0
    discretization: str = EQUIWIDTH
    b_max: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "algorithm", normalize_algorithm(self.algorithm))
        if not 1 <= self.k_min <= self.k_max:
            raise ValueError(f"need 1 <= k_min <= k_max, got {self.k_min}, {self.k_max}")
        if self.min_pts < 1:
            raise ValueError(f"min_pts must be positive, got {self.min_pts}")
        if self.sample_size is not None and self.sample_size < 1:
            raise ValueError(f"sample_size must be positive, got {self.sample_size}")
        if self.discretization not in (EQUIWIDTH, EQUIDEPTH):
            raise ValueError(f"unknown discretization {self.discretization!r}")

    def validate(self, n: int) -> None:
        """Check the parameters against a dataset of ``n`` cases."""
        if n < 2 and self.algorithm != SECODA:
            raise ValueError(f"{self.algorithm} needs at least 2 cases, got {n}")
        if self.algorithm == KNN_AGG and self.k_max >= n:
            raise ValueError(f"k_max={self.k_max} must be < n={n}")
        if self.algorithm == LOF and self.min_pts >= n:
            raise ValueError(f"min_pts={self.min_pts} must be < n={n}")
        if self.algorithm == QSP and self.sample_size is not None and self.sample_size > n:
            raise ValueError(f"sample_size={self.sample_size} exceeds n={n}")

    def with_(self, **changes) -> DetectorSpec:
        return replace(self, **changes)


def _matrix(M) -> np.ndarray:
    return np.asarray(M.values if isinstance(M, EncodedMatrix) else M, dtype=np.float64)


def knn_agg_raw(M, k_min: int = 1, k_max: int = 10) -> np.ndarray:
    """Sum of distances to the ``k_min``-th through ``k_max``-th neighbours."""
    X = _matrix(M)
    n = len(X)
    if n < 2:
        raise ValueError("knn_agg needs at least 2 cases")
    if k_max >= n:
        raise ValueError(f"k_max={k_max} must be < n={n}")
    dist, _ = knn_search(X, X, k_max)
    return dist[:, k_min - 1 : k_max].sum(axis=1)


def knn_agg(M, k_min: int = 1, k_max: int = 10) -> ScoreVector:
    """Aggregated k-NN distance detector (largest aggregate distance scores lowest)."""
    return ScoreVector(-knn_agg_raw(M, k_min, k_max), role="knn_agg")


def qsp_sample(n: int, sample_size: int, seed: int) -> np.ndarray:
    """Indices of the QSP reference sample, drawn without replacement."""
    if not 1 <= sample_size <= n:
        raise ValueError(f"sample_size={sample_size} must be in [1, {n}]")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=sample_size, replace=False))


def qsp_raw(M, sample: np.ndarray) -> np.ndarray:
    """Distance from each case to the nearest sampled case other than itself.

    With a single-point sample the sampled case has no reference and scores 0.
    """
    X = _matrix(M)
    sample = np.asarray(sample, dtype=np.int64)
    if len(sample) == 1:
        raw = np.linalg.norm(X - X[sample[0]], axis=1)
        return raw
    dist, _ = knn_search(X, X[sample], 1, np.arange(len(X)), sample)
    return dist[:, 0]


def qsp(M, sample_size: int | None = None, seed: int = 0) -> ScoreVector:
    """Sampling-based distance detector: 1-NN distance to a random sample."""
    X = _matrix(M)
    size = min(3000, len(X)) if sample_size is None else sample_size
    sample = qsp_sample(len(X), size, seed)
    return ScoreVector(-qsp_raw(X, sample), role="qsp", meta={"sample_size": int(size)})


def lof_raw(M, min_pts: int = 10) -> np.ndarray:
    """Local outlier factor with a neighbourhood of ``min_pts`` points.

    Neighbourhoods hold exactly ``min_pts`` points (distance ties broken by
    row order). A zero mean reachability distance (duplicates) gives a local
    reachability density of ``1 / eps``, where ``eps`` is the smallest
    positive reachability distance in the data.
    """
    X = _matrix(M)
    n = len(X)
    if min_pts >= n:
        raise ValueError(f"min_pts={min_pts} must be < n={n}")
    dist, idx = knn_search(X, X, min_pts)
    k_distance = dist[:, -1]
    reach = np.maximum(k_distance[idx], dist)
    mean_reach = reach.mean(axis=1)
    positive = reach[reach > 0]
    eps = positive.min() if positive.size else 1.0
    lrd = np.where(mean_reach > 0, 1.0 / np.where(mean_reach > 0, mean_reach, 1.0), 1.0 / eps)
    return lrd[idx].mean(axis=1) / lrd


def lof(M, min_pts: int = 10) -> ScoreVector:
    """LOF detector; the highest LOF receives the lowest score."""
    return ScoreVector(-lof_raw(M, min_pts), role="lof")


def run_detector(spec: DetectorSpec, ds: Dataset, scope: str = FULL) -> ScoreVector:
    """Run ``spec`` on all attributes (``"full"``) or the numeric ones (``"continuous"``).

    SECODA consumes the dataset directly; distance-based detectors run on
    :func:`~hdadetect.core.encode` output. SECODA's ``ultimate_arity`` is
    exposed in ``meta``.
    """
    if scope not in (FULL, CONTINUOUS):
        raise ValueError(f"unknown scope {scope!r}")
    if scope == CONTINUOUS:
        ds = continuous_view(ds).as_dataset()
    spec.validate(ds.n_cases)
    role = "aas" if scope == FULL else "ads"
    if spec.algorithm == SECODA:
        res = secoda(ds, spec.discretization, spec.b_max)
        return ScoreVector(res.scores.values, role=role, meta=dict(res.scores.meta))
    M = encode(ds, include_categoricals=True)
    if M.shape[1] == 0:
        raise DatasetError("nothing to score: no encodable columns")
    if spec.algorithm == KNN_AGG:
        sv = knn_agg(M, spec.k_min, spec.k_max)
    elif spec.algorithm == QSP:
        sv = qsp(M, spec.sample_size, spec.seed)
    else:
        sv = lof(M, spec.min_pts)
    logger.debug("%s on %s scope: n=%d, m=%d", spec.algorithm, scope, *M.shape)
    return ScoreVector(sv.values, role=role, meta=dict(sv.meta))
