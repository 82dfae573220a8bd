"""Iterative Partial Push (IPP) framework for high-density anomalies.

The underlying detector is run twice: on all attributes (general
anomalousness, ``aas``) and on the numeric attributes only (neighbourhood
density, ``ads``). Iteration ``i`` takes the cases below the ``i/QD`` quantile
of ``aas``, drops the cases below a slightly wider quantile of ``ads`` (the
isolated ones; QuantileFilterBoost widens it), and scores the survivors that
have no score yet as ``i.<rank>``. Cases never selected are the isolated ones
and get scores above ``QD + 1``, largest for the most isolated.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, ScoreVector, continuous_view
from .detectors import CONTINUOUS, FULL, DetectorSpec, run_detector
from .secoda import EQUIWIDTH, constellation_frequencies, discretize

logger = logging.getLogger(__name__)

AUTO = "auto"
# sentinel used by the original pseudocode for "compute QFB automatically"
QFB_SENTINEL = -9999

# bins per numeric attribute for the automatic QFB density comparison
QFB_ARITY = 6

ITERATION = "iteration"
ISOLATED = "isolated"


@dataclass(frozen=True)
class IppConfig:
    """IPP parameters: quantile denominator, filter boost and detector."""

    qd: int = 100
    qfb: float | str = AUTO
    underlying: DetectorSpec = field(default_factory=DetectorSpec)
    qfb_arity: int = QFB_ARITY

    def __post_init__(self) -> None:
        if int(self.qd) != self.qd or self.qd < 2:
            raise ValueError(f"QD must be an integer >= 2, got {self.qd}")
        qfb = self.qfb
        if isinstance(qfb, str):
            if qfb.lower() != AUTO:
                qfb = float(qfb)
            else:
                qfb = AUTO
        if qfb == QFB_SENTINEL:
            qfb = AUTO
        if qfb != AUTO and (not math.isfinite(qfb) or qfb < 0):
            raise ValueError(f"QFB must be >= 0 or 'auto', got {self.qfb}")
        if int(self.qfb_arity) != self.qfb_arity or self.qfb_arity < 1:
            raise ValueError(f"qfb_arity must be a positive integer, got {self.qfb_arity}")
        object.__setattr__(self, "qfb", qfb)
        object.__setattr__(self, "qd", int(self.qd))


def calculate_qfb(ads, n: int, p_c: int, ultimate_arity: int) -> float:
    """QuantileFilterBoost from expected versus observed density.

    ``2 * (n / ultimate_arity**p_c) / mean(ads) * 100``: close to 200 for
    scattered data, small for strongly clustered data.
    """
    mean_density = float(np.mean(np.asarray(ads, dtype=np.float64)))
    if mean_density == 0:
        raise ValueError("mean density is zero; QFB is undefined")
    expected = n / float(ultimate_arity) ** p_c
    return 2.0 * (expected / mean_density) * 100.0


def auto_qfb(ds: Dataset, arity: int = QFB_ARITY) -> float:
    """QFB from an equiwidth discretization of the numeric attributes.

    Each case's density is the number of cases sharing its cell when every
    numeric attribute is cut into ``arity`` equal-width bins; the expected
    density under uniform scatter is ``n / arity**p_c``.
    """
    view = continuous_view(ds)
    X = view.as_dataset().numeric_matrix()
    codes = [discretize(X[:, j], arity, EQUIWIDTH) for j in range(view.p_c)]
    density = constellation_frequencies(codes, ds.n_cases)
    return calculate_qfb(density, ds.n_cases, view.p_c, arity)


def encode_score(iteration: int, rank: int, subset_size: int) -> float:
    """Concatenate iteration and zero-padded within-iteration rank: (3, 2, 19) -> 3.02."""
    if not 1 <= rank <= subset_size:
        raise ValueError(f"rank {rank} outside subset of size {subset_size}")
    digits = len(str(subset_size))
    return float(f"{iteration}.{rank:0{digits}d}")


def _count_below(qp: float, n: int) -> int:
    """Position (1-based) of the inverted-CDF quantile ``qp`` in a sorted sample of ``n``."""
    c = qp * n
    r = round(c)
    if abs(c - r) < 1e-9:
        c = r
    return min(n, max(1, math.ceil(c)))


def quantile_thresholds(aas: np.ndarray, ads: np.ndarray, qd: int, qfb: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-iteration quantile values of ``aas`` and ``ads`` (index 0 is iteration 1)."""
    n = len(aas)
    sa, sd = np.sort(aas), np.sort(ads)
    qa = np.empty(qd)
    qdv = np.empty(qd)
    for i in range(1, qd + 1):
        ka = -(-i * n // qd)
        qa[i - 1] = sa[ka - 1]
        qp = min((qd - 1) / qd, (i + qd / 100 * qfb) / qd)
        qdv[i - 1] = sd[_count_below(qp, n) - 1]
    return qa, qdv


def _assign(values: np.ndarray, members: np.ndarray, iteration: int, aas: np.ndarray, ads: np.ndarray) -> None:
    # ascending aas, descending ads, then case order
    order = np.lexsort((members, -ads[members], aas[members]))
    size = len(members)
    for rank, pos in enumerate(order, start=1):
        values[members[pos]] = encode_score(iteration, rank, size)


def _fallback(values: np.ndarray, ads: np.ndarray, qd: int) -> np.ndarray:
    unscored = np.isnan(values)
    values[unscored] = 1.0 + ads.max() - ads[unscored] + qd
    return np.where(unscored, ISOLATED, ITERATION).astype(object)


def ipp_scores(aas, ads, qd: int = 100, qfb: float = 0.0) -> ScoreVector:
    """Run the IPP loop on precomputed ``aas`` and ``ads`` vectors."""
    aas = np.asarray(aas, dtype=np.float64)
    ads = np.asarray(ads, dtype=np.float64)
    if aas.shape != ads.shape or aas.ndim != 1:
        raise ValueError("aas and ads must be 1-D vectors of equal length")
    n = len(aas)
    qa, qdv = quantile_thresholds(aas, ads, qd, qfb)
    values = np.full(n, np.nan)
    for i in range(1, qd + 1):
        aas_ids = aas < qa[i - 1]
        ads_ids = ads < qdv[i - 1]
        hds_ids = aas_ids & ~ads_ids
        members = np.flatnonzero(hds_ids & np.isnan(values))
        if members.size:
            _assign(values, members, i, aas, ads)
    prov = _fallback(values, ads, qd)
    return ScoreVector(values, role="hds", provenance=prov, meta={"qd": qd, "qfb": float(qfb)})


def first_qualifying_iteration(aas, ads, qd: int = 100, qfb: float = 0.0) -> np.ndarray:
    """Earliest iteration at which each case is selected (0 if never).

    Every case is evaluated on its own, so this can be split across workers.
    """
    aas = np.asarray(aas, dtype=np.float64)
    ads = np.asarray(ads, dtype=np.float64)
    qa, qdv = quantile_thresholds(aas, ads, qd, qfb)
    ok = (aas[:, None] < qa[None, :]) & ~(ads[:, None] < qdv[None, :])
    first = ok.argmax(axis=1) + 1
    return np.where(ok.any(axis=1), first, 0)


def ipp_scores_parallel(aas, ads, qd: int = 100, qfb: float = 0.0) -> ScoreVector:
    """Same output as :func:`ipp_scores`, computed per case instead of per iteration."""
    aas = np.asarray(aas, dtype=np.float64)
    ads = np.asarray(ads, dtype=np.float64)
    first = first_qualifying_iteration(aas, ads, qd, qfb)
    values = np.full(len(aas), np.nan)
    for i in np.unique(first[first > 0]):
        _assign(values, np.flatnonzero(first == i), int(i), aas, ads)
    prov = _fallback(values, ads, qd)
    return ScoreVector(values, role="hds", provenance=prov, meta={"qd": qd, "qfb": float(qfb)})


def ipp(ds: Dataset, cfg: IppConfig | None = None) -> ScoreVector:
    """High-density anomaly scores for ``ds``; lowest scores are the strongest HDAs."""
    cfg = cfg or IppConfig()
    continuous_view(ds)
    aas = run_detector(cfg.underlying, ds, FULL)
    ads = run_detector(cfg.underlying, ds, CONTINUOUS)
    qfb = auto_qfb(ds, cfg.qfb_arity) if cfg.qfb == AUTO else float(cfg.qfb)
    logger.info("IPP with %s: QD=%d, QFB=%.4g", cfg.underlying.algorithm, cfg.qd, qfb)
    out = ipp_scores(aas.values, ads.values, cfg.qd, qfb)
    meta = dict(out.meta, underlying=cfg.underlying.algorithm, qfb_auto=cfg.qfb == AUTO)
    return ScoreVector(out.values, role="hds", provenance=out.provenance, meta=meta)
