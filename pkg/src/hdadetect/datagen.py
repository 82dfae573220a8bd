"""Seeded generators of labeled benchmark sets with planted high-density anomalies.

Four structural analogs are available (``gleuf``, ``noisyhelix``,
``multiset4d``, ``multiset5d``). Each mixes class-labeled clusters with
uniform background noise and plants a small number of labeled HDAs inside
dense cluster cores. Isolated background noise gets a class drawn uniformly
from the structure classes; noise that happens to fall inside a structure
takes its class, so planted cases are the only class deviants in dense areas.
"""

from __future__ import annotations

import json
from collections import Counter
import math
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from .core import CATEGORICAL, NUMERIC, Column, Dataset, encode, write_dataset
from .kernels import knn_search

# base sizes (cases, planted HDAs) at scale 1
BASE_SIZES = {
    "gleuf": (25853, 6),
    "noisyhelix": (9665, 15),
    "multiset4d": (7853, 22),
    "multiset5d": (70767, 40),
}
SET_NAMES = tuple(BASE_SIZES)

NOISE_FRACTION = {"gleuf": 0.10, "noisyhelix": 0.10, "multiset4d": 0.05, "multiset5d": 0.005}

# bounding box of every set (raw units); noise is uniform over it
BOX = 100.0

HELIX_RADIUS = 15.0
HELIX_JITTER = 0.5

# per-cluster standard deviations of the multiset5d grid, cycled over clusters
MS5D_SPREADS = (0.5, 3.0, 3.0)


@dataclass(frozen=True)
class GenSpec:
    set_name: str
    seed: int = 0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.set_name not in BASE_SIZES:
            raise ValueError(f"unknown set {self.set_name!r}; expected one of {SET_NAMES}")
        if not 0 < self.scale <= 1:
            raise ValueError(f"scale must be in (0, 1], got {self.scale}")


@dataclass(frozen=True)
class GeneratedSet:
    dataset: Dataset
    manifest: list[dict] = field(default_factory=list)
    spec: GenSpec | None = None

    def write(self, csv_path: str | Path) -> tuple[Path, Path]:
        """Write ``<name>.csv`` and ``<name>.manifest.json`` next to it."""
        csv_path = Path(csv_path)
        write_dataset(self.dataset, csv_path)
        man_path = manifest_path(csv_path)
        payload = {
            "set": self.spec.set_name if self.spec else None,
            "seed": self.spec.seed if self.spec else None,
            "scale": self.spec.scale if self.spec else None,
            "n_cases": self.dataset.n_cases,
            "n_hdas": len(self.manifest),
            "hdas": self.manifest,
        }
        man_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return csv_path, man_path


def manifest_path(csv_path: str | Path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".manifest.json")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def scaled_sizes(set_name: str, scale: float) -> tuple[int, int]:
    n, h = BASE_SIZES[set_name]
    return _round_half_up(n * scale), max(1, _round_half_up(h * scale))


def _split(total: int, weights: list[float], minimum: int = 0) -> list[int]:
    """Largest-remainder split of ``total`` into parts proportional to ``weights``."""
    w = np.asarray(weights, dtype=float)
    raw = total * w / w.sum()
    parts = np.floor(raw).astype(int)
    for j in np.argsort(-(raw - parts), kind="stable")[: total - parts.sum()]:
        parts[j] += 1
    if minimum:
        for j in range(len(parts)):
            while parts[j] < minimum:
                donor = int(np.argmax(parts))
                if parts[donor] <= minimum:
                    raise ValueError("not enough cases to satisfy the minimum split")
                parts[donor] -= 1
                parts[j] += 1
    return parts.tolist()


def _gaussian(rng, n, mean, sd, rot=None):
    z = rng.normal(size=(n, 3)) * np.asarray(sd)
    if rot is not None:
        z = z @ rot.T
    return z + np.asarray(mean)


def _rotation(angle_deg: float) -> np.ndarray:
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _core_point(rng, mean, sd, rot=None, spread=0.25):
    return _gaussian(rng, 1, mean, np.asarray(sd) * spread, rot)[0]


@dataclass
class _Builder:
    """Accumulates points, class tuples and planting records."""

    points: list = field(default_factory=list)
    classes: list = field(default_factory=list)
    hda: list = field(default_factory=list)
    records: list = field(default_factory=list)
    redraws: list = field(default_factory=list)

    def add(self, pts, cls, hda=False, record=None):
        pts = np.atleast_2d(pts)
        self.points.append(pts)
        self.classes.extend([tuple(cls)] * len(pts))
        self.hda.extend([hda] * len(pts))
        if record is not None:
            self.records.append(record)

    def plant(self, draw, cls, record):
        """Add one HDA at ``draw()``; ``draw`` is kept to re-place it later."""
        p = draw()
        self.add(p, cls, True, dict(record, location=p.tolist()))
        self.redraws.append(draw)


def _noise(rng, n):
    return rng.uniform(0.0, BOX, size=(n, 3))


def _clip(pts):
    return np.clip(pts, 0.0, BOX)


def _gen_gleuf(rng, n, n_hda, b: _Builder) -> list:
    n_noise = _round_half_up(n * NOISE_FRACTION["gleuf"])
    n_clusters = n - n_noise - n_hda
    sizes = _split(n_clusters, [1, 1])
    rot = _rotation(20.0)
    clusters = [
        {"cls": ("red",), "mean": (30.0, 34.0, 34.0), "sd": (14.0, 5.0, 5.0)},
        {"cls": ("blue",), "mean": (68.0, 66.0, 66.0), "sd": (14.0, 5.0, 5.0)},
    ]
    for c, size in zip(clusters, sizes):
        b.add(_clip(_gaussian(rng, size, c["mean"], c["sd"], rot)), c["cls"])
    # 2 blue in the red cluster, 4 red in the blue cluster at scale 1
    into = [0] * _split(n_hda, [2, 4])[0] + [1] * _split(n_hda, [2, 4])[1]
    for target in into:
        c = clusters[target]
        wrong = clusters[1 - target]["cls"]
        draw = partial(_core_point, rng, c["mean"], c["sd"], rot)
        b.plant(draw, wrong, {"type": "VI", "cluster": target, "class": list(wrong)})
    b.add(_noise(rng, n_noise), ("noise",))
    return [c["cls"] for c in clusters]


def _helix_points(t, radius=None, pitch=80.0 / (4 * 2 * math.pi)):
    radius = HELIX_RADIUS if radius is None else radius
    return np.column_stack(
        [50.0 + radius * np.cos(t), 50.0 + radius * np.sin(t), 10.0 + pitch * t]
    )


def _helix_core_point(rng, segment, jitter):
    # stay away from segment boundaries so the neighbourhood is one class
    t = 2 * math.pi * (segment + rng.uniform(0.2, 0.8))
    return _helix_points(np.array([t]))[0] + rng.normal(size=3) * jitter * 0.25


def _gen_noisyhelix(rng, n, n_hda, b: _Builder) -> list:
    n_noise = _round_half_up(n * NOISE_FRACTION["noisyhelix"])
    n_curve = n - n_noise - n_hda
    classes = [("A",), ("B",), ("C",), ("D",)]
    turns = len(classes)
    t = rng.uniform(0.0, 2 * math.pi * turns, size=n_curve)
    seg = np.minimum((t // (2 * math.pi)).astype(int), turns - 1)
    jitter = HELIX_JITTER
    pts = _helix_points(t) + rng.normal(size=(n_curve, 3)) * jitter
    for s in range(turns):
        b.add(_clip(pts[seg == s]), classes[s])
    for j in range(n_hda):
        s = int(rng.integers(turns))
        wrong = classes[(s + 1 + int(rng.integers(turns - 1))) % turns]
        b.plant(partial(_helix_core_point, rng, s, jitter), wrong, {"type": "VI", "cluster": s, "class": list(wrong)})
    b.add(_noise(rng, n_noise), ("noise",))
    return classes


_MS4D_CLUSTERS = [
    # mean, sd, class
    ((20.0, 20.0, 25.0), (4.0, 4.0, 4.0), "c1"),
    ((75.0, 25.0, 20.0), (5.0, 3.0, 4.0), "c2"),
    ((30.0, 75.0, 30.0), (3.5, 5.0, 3.5), "c3"),
    ((75.0, 75.0, 35.0), (4.0, 4.0, 6.0), "c4"),
    ((25.0, 30.0, 75.0), (5.0, 4.0, 3.0), "c5"),
    ((70.0, 30.0, 70.0), (3.0, 3.0, 3.0), "c6"),
    ((35.0, 70.0, 75.0), (4.0, 6.0, 4.0), "c7"),
    ((72.0, 72.0, 75.0), (4.5, 4.5, 4.5), "c1"),
]


def _gen_multiset4d(rng, n, n_hda, b: _Builder) -> list:
    n_noise = _round_half_up(n * NOISE_FRACTION["multiset4d"])
    sizes = _split(n - n_noise - n_hda, [1.0] * len(_MS4D_CLUSTERS))
    for (mean, sd, cls), size in zip(_MS4D_CLUSTERS, sizes):
        b.add(_clip(_gaussian(rng, size, mean, sd)), (cls,))
    for j in range(n_hda):
        target = j % len(_MS4D_CLUSTERS)
        mean, sd, cls = _MS4D_CLUSTERS[target]
        others = sorted({c for _, _, c in _MS4D_CLUSTERS} - {cls})
        wrong = (others[int(rng.integers(len(others)))],)
        b.plant(partial(_core_point, rng, mean, sd), wrong, {"type": "VI", "cluster": target, "class": list(wrong)})
    b.add(_noise(rng, n_noise), ("noise",))
    return sorted({(c,) for _, _, c in _MS4D_CLUSTERS})


_COLORS = ("blue", "green", "red", "yellow")
_SHAPES = ("circle", "cross", "square", "triangle")
# half of the color/shape combinations occur; the rest are Type V material
_PRESENT = [(c, s) for i, c in enumerate(_COLORS) for j, s in enumerate(_SHAPES) if (i + j) % 4 in (0, 1)]


def _ms5d_layout():
    """Grid-regular clusters; each owns one (color, shape) combination."""
    clusters = []
    axis = (20.0, 50.0, 80.0)
    j = 0
    for x in axis:
        for y in axis:
            for z in (30.0, 70.0):
                sd = MS5D_SPREADS[j % len(MS5D_SPREADS)]
                clusters.append(((x, y, z), (sd, sd, sd), _PRESENT[j % len(_PRESENT)]))
                j += 1
    return clusters


def _gen_multiset5d(rng, n, n_hda, b: _Builder) -> list:
    clusters = _ms5d_layout()
    n_noise = _round_half_up(n * NOISE_FRACTION["multiset5d"])
    if n_hda < 3:
        raise ValueError("multiset5d needs at least 3 HDAs to hold the II/V/VI mix; increase scale")
    weights = [1.0 + 0.5 * (j % 3) for j in range(len(clusters))]
    sizes = _split(n - n_noise - n_hda, weights)
    for (mean, sd, cls), size in zip(clusters, sizes):
        b.add(_clip(_gaussian(rng, size, mean, sd)), cls)
    present = {c for _, _, c in clusters}
    absent = sorted({(c, s) for c in _COLORS for s in _SHAPES} - present)
    n_ii, n_v, n_vi = _split(n_hda, [1, 1, 2], minimum=1)
    plan = ["II"] * n_ii + ["V"] * n_v + ["VI"] * n_vi
    for j, kind in enumerate(plan):
        target = int(rng.integers(len(clusters)))
        mean, sd, own = clusters[target]
        if kind == "II":
            cls = (own[0], "star")
        elif kind == "V":
            cls = absent[int(rng.integers(len(absent)))] if absent else (own[0], "star")
        else:
            others = sorted(present - {own})
            cls = others[int(rng.integers(len(others)))]
        draw = partial(_core_point, rng, mean, sd, spread=0.3)
        b.plant(draw, cls, {"type": kind, "cluster": target, "class": list(cls)})
    b.add(_noise(rng, n_noise), ("noise", "noise"))
    return sorted(present)


def _label_noise(rng, pts, classes, hda, pool, k=10, quantile=0.99):
    """Assign classes to the ``("noise", ...)`` placeholder rows.

    Noise that falls inside a structure (its ``k``-NN distance to structure
    points is within the structure's own ``quantile`` spread) takes the
    majority class of those neighbours; the rest gets a class drawn uniformly
    from ``pool``.
    """
    is_noise = np.array([c[0] == "noise" for c in classes])
    noise_rows = np.flatnonzero(is_noise)
    if noise_rows.size == 0:
        return classes
    struct = np.flatnonzero(~is_noise & ~hda)
    S = pts[struct]
    own, _ = knn_search(S, S, k)
    limit = 1.5 * np.quantile(own.mean(axis=1), quantile)
    dist, idx = knn_search(pts[noise_rows], S, k, noise_rows, struct)
    draws = rng.integers(len(pool), size=noise_rows.size)
    for row, d, nb, j in zip(noise_rows, dist, idx, draws):
        if d.mean() <= limit:
            votes = [classes[struct[t]] for t in nb]
            classes[row] = max(sorted(set(votes)), key=votes.count)
        else:
            classes[row] = pool[j]
    return classes


_GENERATORS = {
    "gleuf": _gen_gleuf,
    "noisyhelix": _gen_noisyhelix,
    "multiset4d": _gen_multiset4d,
    "multiset5d": _gen_multiset5d,
}


def generate(spec: GenSpec) -> GeneratedSet:
    """Generate one labeled set; identical specs give identical output."""
    n, n_hda = scaled_sizes(spec.set_name, spec.scale)
    if n_hda > 0.01 * n:
        raise ValueError(f"scale {spec.scale} leaves too few cases for {n_hda} HDAs")
    rng = np.random.default_rng(spec.seed)
    b = _Builder()
    pool = _GENERATORS[spec.set_name](rng, n, n_hda, b)
    pts = np.vstack(b.points)
    hda = np.array(b.hda)
    classes = _label_noise(rng, pts, list(b.classes), hda, pool)
    _settle_plantings(b, pts, classes, hda)
    perm = rng.permutation(len(pts))
    pts, hda = pts[perm], hda[perm]
    classes = [classes[i] for i in perm]
    # manifest ids follow the shuffled order
    hda_rows = np.flatnonzero(hda)
    order_of_planting = np.argsort(perm[hda_rows], kind="stable")
    manifest = []
    for rec_idx, row in zip(range(len(b.records)), hda_rows[order_of_planting]):
        rec = dict(b.records[rec_idx])
        rec["id"] = int(row) + 1
        manifest.append(rec)
    manifest.sort(key=lambda r: r["id"])
    cols = [Column(f"x{j + 1}", NUMERIC, np.round(pts[:, j], 6)) for j in range(3)]
    cat_names = ["class"] if len(classes[0]) == 1 else ["color", "shape"]
    for j, name in enumerate(cat_names):
        cols.append(Column(name, CATEGORICAL, np.array([c[j] for c in classes], dtype=object)))
    return GeneratedSet(Dataset(tuple(cols), hda), manifest, spec)


def hda_types(gs: GeneratedSet) -> dict[int, str]:
    return {rec["id"]: rec["type"] for rec in gs.manifest}


def _violations(X, combos, rows, kinds, k: int = 10) -> list[tuple[int, dict]]:
    """``(position, record)`` per failed check; ``X`` is min-max scaled numerics."""
    k = min(k, len(X) - 1)
    dist, idx = knn_search(X, X, k)
    mean_d = dist.mean(axis=1)
    median = float(np.median(mean_d))
    out = []
    for pos, (row, kind) in enumerate(zip(rows, kinds)):
        if kind in ("V", "VI") and not mean_d[row] < median:
            out.append((pos, {"type": kind, "check": "density",
                              "mean_knn_distance": float(mean_d[row]), "median": median}))
        if kind == "VI":
            votes = Counter(tuple(combos[j]) for j in idx[row])
            top = max(votes.values())
            majority = min(c for c, v in votes.items() if v == top)
            if tuple(combos[row]) == majority:
                out.append((pos, {"type": kind, "check": "wrong_cluster", "majority": " | ".join(majority)}))
    return out


def _scaled(pts: np.ndarray) -> np.ndarray:
    P = np.round(pts, 6)
    lo, span = P.min(axis=0), np.ptp(P, axis=0)
    return np.where(span > 0, (P - lo) / np.where(span > 0, span, 1.0), 0.0)


def _settle_plantings(b: _Builder, pts, classes, hda, max_rounds: int = 100) -> None:
    """Re-place planted HDAs that fail the density or wrong-cluster check."""
    rows = np.flatnonzero(hda)
    kinds = [r["type"] for r in b.records]
    for _ in range(max_rounds):
        bad = {pos for pos, _ in _violations(_scaled(pts), classes, rows, kinds)}
        if not bad:
            return
        for pos in sorted(bad):
            p = b.redraws[pos]()
            pts[rows[pos]] = p
            b.records[pos]["location"] = p.tolist()
    raise RuntimeError("could not place every HDA in a dense wrong-class neighbourhood")


def verify_hda_plantings(gs: GeneratedSet, k: int = 10) -> list[dict]:
    """Check that planted HDAs sit in dense, other-class neighbourhoods.

    For every Type V/VI HDA the mean distance to its ``k`` nearest numeric
    neighbours must be below the dataset median of that quantity; for every
    Type VI HDA its class combination must differ from the majority class of
    those neighbours. Returns one record per violation (empty when clean).
    """
    ds = gs.dataset
    X = encode(ds.subset_columns(NUMERIC), include_categoricals=False).values
    rows = [rec["id"] - 1 for rec in gs.manifest]
    kinds = [rec["type"] for rec in gs.manifest]
    found = _violations(X, ds.class_combinations(), rows, kinds, k)
    return [{"id": gs.manifest[pos]["id"], **rec} for pos, rec in found]
