"""Harmonic Mean Detection of HDAs (HMDH).

Anomalousness and neighbourhood density are rescaled to [0, 1] so that a
strong HDA is high on both, fused per case with a weighted harmonic mean
(weight 1 for anomalousness, ``w`` for density), and the result is reversed
back to the lowest-is-most-anomalous orientation.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, DatasetError, ScoreVector, continuous_view
from .detectors import CONTINUOUS, FULL, SECODA, DetectorSpec, run_detector

NONE = "none"
SSE = "sse"
SDEN = "sden"
WEIGHT_MODES = (NONE, SSE, SDEN)


@dataclass(frozen=True)
class HmdhConfig:
    weight_mode: str = SDEN
    underlying: DetectorSpec = field(default_factory=lambda: DetectorSpec(algorithm=SECODA))

    def __post_init__(self) -> None:
        mode = str(self.weight_mode).lower()
        if mode not in WEIGHT_MODES:
            raise ValueError(f"unknown weight mode {self.weight_mode!r}; expected one of {WEIGHT_MODES}")
        object.__setattr__(self, "weight_mode", mode)


@dataclass(frozen=True)
class UnitScores:
    """``aas_u`` is 1 for the most anomalous case, ``ads_u`` 1 for the densest."""

    aas_u: np.ndarray
    ads_u: np.ndarray


def _rescale(x: np.ndarray) -> np.ndarray:
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.full_like(x, 0.5)
    return (x - lo) / (hi - lo)


def to_unit(aas, ads) -> UnitScores:
    """Reverse-and-rescale ``aas``, rescale ``ads``; constant vectors become 0.5."""
    a = np.asarray(aas.values if isinstance(aas, ScoreVector) else aas, dtype=np.float64)
    d = np.asarray(ads.values if isinstance(ads, ScoreVector) else ads, dtype=np.float64)
    return UnitScores(aas_u=1.0 - _rescale(a), ads_u=_rescale(d))


def weight_sse(ds: Dataset) -> float:
    """Relative Shannon entropy of the observed class combinations."""
    if not ds.categorical_columns:
        raise DatasetError("SSE weighting needs at least one categorical column")
    counts = np.array(list(Counter(ds.class_combinations().tolist()).values()), dtype=np.float64)
    k = len(counts)
    if k == 1:
        return 0.0
    p = counts / counts.sum()
    return float(min(1.0, max(0.0, -(p * np.log(p)).sum() / math.log(k))))


def _harmonic_mean(values: list[float]) -> float:
    if any(v <= 0 for v in values):
        return 0.0
    return len(values) / sum(1.0 / v for v in values)


def class_mean_densities(density, ds: Dataset) -> dict[tuple, float]:
    """Arithmetic mean of ``density`` per class combination, in lexical order."""
    d = np.asarray(density.values if isinstance(density, ScoreVector) else density, dtype=np.float64)
    combos = ds.class_combinations().tolist()
    keys = sorted(set(combos))
    code = {k: j for j, k in enumerate(keys)}
    idx = np.fromiter((code[c] for c in combos), dtype=np.int64, count=len(combos))
    sums = np.bincount(idx, weights=d, minlength=len(keys))
    counts = np.bincount(idx, minlength=len(keys))
    return {k: float(sums[j] / counts[j]) for j, k in enumerate(keys)}


def sden_from_means(means: list[float]) -> float:
    """Harmonic mean of all but the (first) largest class mean, over that maximum."""
    if len(means) < 2:
        return 1.0
    top = int(np.argmax(means))
    rest = [m for j, m in enumerate(means) if j != top]
    if means[top] <= 0:
        return 1.0
    return float(min(1.0, max(0.0, _harmonic_mean(rest) / means[top])))


def weight_sden(ads, ds: Dataset) -> float:
    """Density-ratio weight from per-class mean densities.

    ``ads`` must be a positive density (high = dense). Classes are ordered
    lexically, so ties for the maximum exclude the lexically first class.
    """
    if not ds.categorical_columns:
        raise DatasetError("SDEN weighting needs at least one categorical column")
    means = class_mean_densities(ads, ds)
    return sden_from_means(list(means.values()))


def fuse(aas_u, ads_u, w: float) -> np.ndarray:
    """Weighted harmonic mean ``(1 + w) / (1/aas_u + w/ads_u)``.

    Zero components give 0; with ``w == 0`` the density term drops out and
    the result is ``aas_u``.
    """
    a = np.asarray(aas_u, dtype=np.float64)
    d = np.asarray(ads_u, dtype=np.float64)
    if w < 0:
        raise ValueError(f"weight must be >= 0, got {w}")
    if w == 0:
        return a.copy()
    zero = (a <= 0) | (d <= 0)
    safe_a = np.where(zero, 1.0, a)
    safe_d = np.where(zero, 1.0, d)
    h = (1.0 + w) / (1.0 / safe_a + w / safe_d)
    return np.where(zero, 0.0, np.minimum(h, 1.0))


def hmdh_scores(aas, ads, w: float) -> ScoreVector:
    """Fuse precomputed ``aas``/``ads`` with weight ``w`` and reverse the result."""
    unit = to_unit(aas, ads)
    h = fuse(unit.aas_u, unit.ads_u, w)
    return ScoreVector(h.max() - h, role="hmdh", meta={"weight": float(w)})


def hmdh(ds: Dataset, cfg: HmdhConfig | None = None) -> ScoreVector:
    """HMDH scores for ``ds``; the lowest score is the most extreme HDA."""
    cfg = cfg or HmdhConfig()
    continuous_view(ds)
    if cfg.weight_mode != NONE and not ds.categorical_columns:
        raise DatasetError(f"{cfg.weight_mode.upper()} weighting needs a categorical column")
    aas = run_detector(cfg.underlying, ds, FULL)
    ads = run_detector(cfg.underlying, ds, CONTINUOUS)
    if cfg.weight_mode == NONE:
        w = 1.0
    elif cfg.weight_mode == SSE:
        w = weight_sse(ds)
    else:
        density = ads.values if ads.values.min() > 0 else to_unit(aas, ads).ads_u
        w = weight_sden(density, ds)
    out = hmdh_scores(aas, ads, w)
    return ScoreVector(out.values, role="hds", meta=dict(out.meta, mode=cfg.weight_mode))
