"""ROC/PRC areas, thresholds and confusion-matrix metrics for HDA scores.

Scores follow the package orientation (lowest = most anomalous), so a case
is predicted positive when its score is strictly below the threshold.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import ScoreVector

METRIC_NAMES = (
    "sensitivity",
    "specificity",
    "precision",
    "accuracy",
    "f1",
    "mcc",
    "kappa",
    "gmrp",
    "hmf",
)


@dataclass(frozen=True)
class LabeledScores:
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.scores.values if isinstance(self.scores, ScoreVector) else self.scores, dtype=np.float64)
        y = np.asarray(self.labels, dtype=bool)
        if s.shape != y.shape or s.ndim != 1:
            raise ValueError(f"scores {s.shape} and labels {y.shape} must be equal-length vectors")
        object.__setattr__(self, "scores", s)
        object.__setattr__(self, "labels", y)

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return int((~self.labels).sum())

    def require_both_classes(self) -> None:
        if self.n_pos == 0 or self.n_neg == 0:
            raise ValueError("labels must contain both positives and negatives")


@dataclass(frozen=True)
class ConfusionMetrics:
    tp: int
    fp: int
    fn: int
    tn: int
    sensitivity: float
    specificity: float
    precision: float
    accuracy: float
    f1: float
    mcc: float
    kappa: float
    gmrp: float
    hmf: float

    def as_dict(self) -> dict:
        return asdict(self)


def _ls(scores, labels=None) -> LabeledScores:
    if isinstance(scores, LabeledScores):
        return scores
    return LabeledScores(scores, labels)


def _div(num: float, den: float) -> float:
    return num / den if den else 0.0


def confusion_from_counts(tp: int, fp: int, fn: int, tn: int) -> ConfusionMetrics:
    """All nine metrics from raw counts; every 0/0 is defined as 0."""
    n = tp + fp + fn + tn
    sens = _div(tp, tp + fn)
    spec = _div(tn, tn + fp)
    prec = _div(tp, tp + fp)
    acc = _div(tp + tn, n)
    f1 = _div(2 * prec * sens, prec + sens)
    mcc_den = math.sqrt(float(tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
    mcc = _div(float(tp) * tn - float(fp) * fn, mcc_den)
    p_e = _div(float(tp + fp) * (tp + fn) + float(fn + tn) * (fp + tn), float(n) * n)
    kappa = _div(acc - p_e, 1.0 - p_e)
    gmrp = math.sqrt(prec * sens)
    four = (sens, spec, prec, acc)
    hmf = 0.0 if min(four) == 0 else 4.0 / sum(1.0 / v for v in four)
    return ConfusionMetrics(tp, fp, fn, tn, sens, spec, prec, acc, f1, mcc, kappa, gmrp, hmf)


def confusion_from_mask(predicted, labels) -> ConfusionMetrics:
    pred = np.asarray(predicted, dtype=bool)
    y = np.asarray(labels, dtype=bool)
    tp = int(np.sum(pred & y))
    fp = int(np.sum(pred & ~y))
    fn = int(np.sum(~pred & y))
    tn = int(np.sum(~pred & ~y))
    return confusion_from_counts(tp, fp, fn, tn)


def confusion_metrics(ls, threshold: float, labels=None) -> ConfusionMetrics:
    """Metrics when cases with ``score < threshold`` are predicted HDAs."""
    ls = _ls(ls, labels)
    return confusion_from_mask(ls.scores < threshold, ls.labels)


def _average_ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    xs = x[order]
    _, first, counts = np.unique(xs, return_index=True, return_counts=True)
    avg = first + (counts + 1) / 2.0
    ranks = np.empty(len(x))
    ranks[order] = np.repeat(avg, counts)
    return ranks


def roc_auc(ls, labels=None) -> float:
    """Probability that a positive scores lower than a negative (ties count half)."""
    ls = _ls(ls, labels)
    ls.require_both_classes()
    r = _average_ranks(ls.scores)
    n_pos, n_neg = ls.n_pos, ls.n_neg
    # pairs where the positive ranks lower, from the rank sum of the positives
    u = n_pos * n_neg + n_pos * (n_pos + 1) / 2.0 - r[ls.labels].sum()
    return float(u / (n_pos * n_neg))


def _sweep(ls: LabeledScores) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cumulative (threshold value, TP, FP) per distinct score, ascending."""
    order = np.argsort(ls.scores, kind="stable")
    s = ls.scores[order]
    y = ls.labels[order]
    last = np.r_[s[1:] != s[:-1], True]
    tp = np.cumsum(y)[last]
    fp = np.cumsum(~y)[last]
    return s[last], tp, fp


def roc_curve(ls, labels=None) -> tuple[np.ndarray, np.ndarray]:
    """Empirical ROC points ``(fpr, tpr)`` starting at (0, 0); ties form one step."""
    ls = _ls(ls, labels)
    ls.require_both_classes()
    _, tp, fp = _sweep(ls)
    fpr = np.r_[0.0, fp / ls.n_neg]
    tpr = np.r_[0.0, tp / ls.n_pos]
    return fpr, tpr


def partial_roc_auc(ls, labels=None, spec_band: tuple[float, float] = (0.9, 1.0)) -> float:
    """Normalized ROC area over a specificity band (default 90-100%).

    The curve is integrated with the trapezoid rule between
    ``fpr = 1 - spec_band[1]`` and ``fpr = 1 - spec_band[0]``, interpolating
    linearly at the band edges, and divided by the band width.
    """
    ls = _ls(ls, labels)
    lo_spec, hi_spec = spec_band
    a, b = 1.0 - hi_spec, 1.0 - lo_spec
    if not 0.0 <= a < b <= 1.0:
        raise ValueError(f"invalid specificity band {spec_band}")
    fpr, tpr = roc_curve(ls)
    area = 0.0
    for x0, x1, y0, y1 in zip(fpr[:-1], fpr[1:], tpr[:-1], tpr[1:]):
        lo, hi = max(a, x0), min(b, x1)
        if hi <= lo:
            continue
        slope = (y1 - y0) / (x1 - x0)
        ya = y0 + slope * (lo - x0)
        yb = y0 + slope * (hi - x0)
        area += (hi - lo) * (ya + yb) / 2.0
    return float(area / (b - a))


def prc_auc(ls, labels=None) -> float:
    """Average precision: sum of recall increments times precision per threshold."""
    ls = _ls(ls, labels)
    ls.require_both_classes()
    _, tp, fp = _sweep(ls)
    recall = tp / ls.n_pos
    precision = tp / (tp + fp)
    return float(np.sum(np.diff(np.r_[0.0, recall]) * precision))


def _candidate_thresholds(scores: np.ndarray) -> np.ndarray:
    u = np.unique(scores)
    mids = (u[:-1] + u[1:]) / 2.0
    return np.r_[u[0] - 1.0, mids, u[-1] + 1.0]


def youden(ls, labels=None) -> tuple[float, float]:
    """Threshold maximizing ``J = sensitivity + specificity - 1`` and that ``J``.

    Candidates are the midpoints between consecutive distinct scores plus one
    threshold below and one above all scores; ties keep the smallest threshold.
    """
    ls = _ls(ls, labels)
    ls.require_both_classes()
    cands = _candidate_thresholds(ls.scores)
    s = np.sort(ls.scores[ls.labels])
    t = np.sort(ls.scores[~ls.labels])
    tp = np.searchsorted(s, cands, side="left")
    fp = np.searchsorted(t, cands, side="left")
    j = tp / ls.n_pos + (ls.n_neg - fp) / ls.n_neg - 1.0
    best = int(np.argmax(j))
    return float(cands[best]), float(j[best])


def youden_threshold(ls, labels=None) -> float:
    return youden(ls, labels)[0]


def topk_mask(scores, k: int) -> np.ndarray:
    """Boolean mask of the ``k`` lowest scores, ties broken by case order."""
    s = np.asarray(scores.values if isinstance(scores, ScoreVector) else scores, dtype=np.float64)
    n = len(s)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must be in [1, {n}]")
    order = np.lexsort((np.arange(n), s))
    mask = np.zeros(n, dtype=bool)
    mask[order[:k]] = True
    return mask


def topk_threshold(scores, k: int) -> float:
    """Threshold predicting exactly the ``k`` lowest-scored cases.

    This is the midpoint between the ``k``-th and ``k+1``-th smallest scores
    (or one above the maximum when ``k == n``). When those two scores are tied
    no single threshold separates them; use :func:`topk_mask` instead.
    """
    s = np.sort(np.asarray(scores.values if isinstance(scores, ScoreVector) else scores, dtype=np.float64))
    n = len(s)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must be in [1, {n}]")
    if k == n:
        return float(s[-1] + 1.0)
    if s[k - 1] == s[k]:
        raise ValueError(f"scores tied at the top-{k} boundary; no exact threshold exists")
    return float((s[k - 1] + s[k]) / 2.0)


def precision_at_k(scores, labels, k: int) -> float:
    mask = topk_mask(scores, k)
    return float(np.asarray(labels, dtype=bool)[mask].mean())


def evaluate(scores, labels) -> dict:
    """Flat-ish report: AUCs plus metrics at the top-k and Youden thresholds.

    AUC and Youden fields are ``None`` when only one class is present.
    """
    ls = _ls(scores, labels)
    both = ls.n_pos > 0 and ls.n_neg > 0
    report: dict = {
        "n": int(len(ls.scores)),
        "n_positive": ls.n_pos,
        "roc_auc": roc_auc(ls) if both else None,
        "partial_roc_auc": partial_roc_auc(ls) if both else None,
        "partial_roc_auc_band": [0.9, 1.0],
        "prc_auc": prc_auc(ls) if both else None,
    }
    k = ls.n_pos
    if k > 0:
        mask = topk_mask(ls.scores, k)
        try:
            thr = topk_threshold(ls.scores, k)
        except ValueError:
            thr = None
    else:
        mask = np.zeros(len(ls.scores), dtype=bool)
        thr = float(np.min(ls.scores))
    report["topk"] = {"k": k, "threshold": thr, **confusion_from_mask(mask, ls.labels).as_dict()}
    if both:
        y_thr, j = youden(ls)
        report["youden"] = {"threshold": y_thr, "j": j, **confusion_metrics(ls, y_thr).as_dict()}
    else:
        report["youden"] = None
    return report
