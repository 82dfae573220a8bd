"""High-density anomaly (HDA) detection.

General detectors (KNN-AGG, QSP, LOF, SECODA) score how anomalous each case
is; the IPP and HMDH frameworks combine that with neighbourhood density to
surface anomalies hiding in dense regions. All score vectors share one
orientation: the lowest score is the most anomalous case.
"""

from .core import (
    CATEGORICAL,
    NUMERIC,
    ORIENTATION,
    Column,
    Dataset,
    DatasetError,
    EncodedMatrix,
    ScoreVector,
    continuous_view,
    encode,
    load_dataset,
    rank_of,
    write_dataset,
)
from .detectors import DetectorSpec, knn_agg, lof, qsp, run_detector
from .evaluation import confusion_from_counts, confusion_metrics, evaluate, partial_roc_auc, prc_auc, roc_auc, youden
from .hmdh import HmdhConfig, hmdh
from .ipp import IppConfig, ipp
from .kernels import BACKEND
from .secoda import secoda

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CATEGORICAL",
    "NUMERIC",
    "ORIENTATION",
    "Column",
    "Dataset",
    "DatasetError",
    "DetectorSpec",
    "EncodedMatrix",
    "HmdhConfig",
    "IppConfig",
    "ScoreVector",
    "confusion_from_counts",
    "confusion_metrics",
    "continuous_view",
    "encode",
    "evaluate",
    "hmdh",
    "ipp",
    "knn_agg",
    "load_dataset",
    "lof",
    "partial_roc_auc",
    "prc_auc",
    "qsp",
    "rank_of",
    "roc_auc",
    "run_detector",
    "secoda",
    "write_dataset",
    "youden",
]
