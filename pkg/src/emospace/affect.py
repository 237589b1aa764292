"""Analytics over a clustering matrix: emotion vectors and what is built on them.

Each column of a :class:`~emospace.delsar.ClusteringMatrix` is an emotion
vector: how the documents of one label were distributed over the labels of
their nearest neighbours.  Two separate pathways use these columns:

* raw columns (self count included) feed the cosine similarity matrix and
  classical MDS;
* zero-weighted, sum-normalised columns feed emotion equations, where pairs
  of vectors are added and compared with a target.
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

from .delsar import ClusteringMatrix
from .errors import DegenerateVectorError, DimensionError, EmospaceError, UnknownLabelError
from .semspace import cosine

MDS_DISSIMILARITY = "1 - cosine"


def data_path(name: str) -> str:
    return str(resources.files("emospace") / "data" / name)


def load_bundled_matrix() -> ClusteringMatrix:
    """The 21-emotion, 1100-documents-per-label clustering matrix shipped with the package."""
    return ClusteringMatrix.from_csv(data_path("delsar1100.csv"))


def load_primaries(path=None) -> tuple:
    with open(path or data_path("primaries.txt"), encoding="utf-8") as fh:
        text = fh.read()
    return tuple(t.strip().lower() for t in text.replace(",", "\n").split() if t.strip())


@dataclass(frozen=True)
class EmotionVector:
    label: str
    labels: tuple
    components: np.ndarray

    @property
    def magnitude(self) -> float:
        return float(np.sqrt(np.sum(self.components.astype(float) ** 2)))

    @property
    def degenerate(self) -> bool:
        return not np.any(self.components)

    def as_dict(self) -> dict:
        return dict(zip(self.labels, self.components.tolist()))


def emotion_vectors(matrix: ClusteringMatrix) -> list:
    return [EmotionVector(label, matrix.labels, matrix.counts[:, j].copy()) for j, label in enumerate(matrix.labels)]


@dataclass(frozen=True)
class SimilarityMatrix:
    labels: tuple
    values: np.ndarray
    degenerate: tuple = ()

    def to_csv(self, path, digits: int | None = None) -> None:
        fmt = repr if digits is None else (lambda v: f"{v:.{digits}f}")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([""] + list(self.labels))
            for label, row in zip(self.labels, self.values):
                w.writerow([label] + [fmt(float(v)) for v in row])


def similarity_matrix(vectors: Sequence[EmotionVector]) -> SimilarityMatrix:
    """Pairwise cosine of raw emotion vectors; exactly symmetric with unit diagonal."""
    n = len(vectors)
    if n and len({len(v.components) for v in vectors}) != 1:
        raise DimensionError("emotion vectors differ in length")
    values = np.eye(n)
    degenerate = tuple(v.label for v in vectors if v.degenerate)
    for i, j in itertools.combinations(range(n), 2):
        c = cosine(vectors[i].components, vectors[j].components)
        values[i, j] = values[j, i] = c
    return SimilarityMatrix(tuple(v.label for v in vectors), values, degenerate)


@dataclass(frozen=True)
class MDSResult:
    labels: tuple
    coordinates: np.ndarray  # n x out_dims
    eigenvalues: np.ndarray  # all eigenvalues of the double-centred matrix, descending
    stress: float
    clipped_eigenvalues: tuple = ()
    dissimilarity: str = MDS_DISSIMILARITY

    def to_csv(self, path) -> None:
        dims = self.coordinates.shape[1]
        axes = ["x", "y", "z"][:dims] if dims <= 3 else [f"dim{i + 1}" for i in range(dims)]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["label"] + axes + ["eigenvalue", "stress"])
            for i, label in enumerate(self.labels):
                ev = repr(float(self.eigenvalues[i])) if i < len(self.eigenvalues) else ""
                w.writerow([label] + [repr(float(c)) for c in self.coordinates[i]] + [ev, repr(self.stress)])


def kruskal_stress(dissimilarities, coordinates) -> float:
    d = np.asarray(dissimilarities, dtype=float)
    diff = coordinates[:, None, :] - coordinates[None, :, :]
    fitted = np.sqrt(np.sum(diff ** 2, axis=-1))
    iu = np.triu_indices(len(d), 1)
    denom = np.sum(d[iu] ** 2)
    if denom == 0:
        return 0.0
    return float(np.sqrt(np.sum((d[iu] - fitted[iu]) ** 2) / denom))


def torgerson(dissimilarities, out_dims: int = 2, labels=None) -> MDSResult:
    """Classical scaling of a dissimilarity matrix.

    Negative eigenvalues of ``-1/2 J D^2 J`` are clipped to zero and reported
    in ``clipped_eigenvalues``.
    """
    d = np.asarray(dissimilarities, dtype=float)
    n = d.shape[0]
    if d.shape != (n, n):
        raise DimensionError("dissimilarity matrix must be square")
    if not np.allclose(d, d.T, atol=1e-12):
        raise EmospaceError("dissimilarity matrix must be symmetric")
    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * j @ (d ** 2) @ j
    b = (b + b.T) / 2
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(-evals, kind="stable")
    evals, evecs = evals[order], evecs[:, order]
    # deterministic orientation: largest-magnitude loading positive
    pivot = np.argmax(np.abs(evecs), axis=0)
    signs = np.sign(evecs[pivot, np.arange(n)])
    signs[signs == 0] = 1.0
    evecs = evecs * signs
    scale = max(1.0, float(np.abs(evals).max()))
    clipped = tuple(float(v) for v in evals if v < -1e-12 * scale)
    top = np.clip(evals[:out_dims], 0.0, None)
    coords = evecs[:, :out_dims] * np.sqrt(top)
    if coords.shape[1] < out_dims:
        coords = np.hstack([coords, np.zeros((n, out_dims - coords.shape[1]))])
    coords = coords - coords.mean(axis=0)
    labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
    return MDSResult(labels, coords, evals, kruskal_stress(d, coords), clipped)


def classical_mds(similarities, out_dims: int = 2) -> MDSResult:
    """MDS of a cosine similarity matrix using ``d = 1 - cos``."""
    if isinstance(similarities, SimilarityMatrix):
        labels, s = similarities.labels, similarities.values
    else:
        s = np.asarray(similarities, dtype=float)
        labels = None
    if out_dims < 1:
        raise ValueError("out_dims must be positive")
    if not np.allclose(s, s.T, atol=1e-12):
        raise EmospaceError("similarity matrix must be symmetric")
    d = 1.0 - s
    np.fill_diagonal(d, 0.0)
    return torgerson(d, out_dims, labels)


@dataclass(frozen=True)
class ValenceMap:
    polarity: Mapping[str, str]
    ordering: tuple = ()
    name: str = "custom"

    def __post_init__(self):
        for label, pol in self.polarity.items():
            if pol not in ("positive", "negative"):
                raise ValueError(f"polarity of {label!r} must be 'positive' or 'negative'")
        if len(set(self.ordering)) != len(self.ordering):
            raise ValueError("circumplex ordering repeats a label")
        object.__setattr__(self, "ordering", tuple(self.ordering))

    def is_positive(self, label) -> bool:
        return self.polarity.get(label) == "positive"

    @classmethod
    def load(cls, path=None) -> "ValenceMap":
        with open(path or data_path("circumplex.json"), encoding="utf-8") as fh:
            data = json.load(fh)
        return cls(data["polarity"], tuple(data.get("ordering", ())), data.get("name", "custom"))


@dataclass(frozen=True)
class EmotionProfile:
    label: str
    positions: tuple  # circumplex labels, in order
    radials: np.ndarray
    polarities: tuple
    positivity: float
    normalized: bool = False

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["position", "neighbour", "radial", "polarity"])
            for i, (lab, r, p) in enumerate(zip(self.positions, self.radials, self.polarities)):
                w.writerow([i, lab, repr(float(r)), p])


def profile(matrix: ClusteringMatrix, label: str, vmap: ValenceMap, normalized: bool = False) -> EmotionProfile:
    """Radar-diagram data for one emotion vector over the circumplex ordering.

    The profiled label's own slot is replaced by the mean of its two cyclic
    neighbours.  ``normalized`` divides radials by their sum.
    """
    order = vmap.ordering
    if label not in order:
        raise UnknownLabelError(f"{label!r} is not in the circumplex ordering")
    missing = [l for l in order if l not in matrix.labels]
    if missing:
        raise UnknownLabelError(f"ordering labels missing from matrix: {', '.join(missing)}")
    col = matrix.column(label).astype(float)
    radials = np.array([col[matrix.index(l)] for l in order])
    p = order.index(label)
    radials[p] = (radials[p - 1] + radials[(p + 1) % len(order)]) / 2.0
    total = radials.sum()
    positive = np.array([vmap.is_positive(l) for l in order])
    positivity = float(radials[positive].sum() / total) if total else 0.0
    if normalized and total:
        radials = radials / total
    polarities = tuple("positive" if pos else "negative" for pos in positive)
    return EmotionProfile(label, order, radials, polarities, positivity, normalized)


def theoretical_positivity(matrix: ClusteringMatrix, vmap: ValenceMap) -> dict:
    """Share of each column's raw counts (self included) falling on positive labels."""
    positive = np.array([vmap.is_positive(l) for l in matrix.labels])
    sums = matrix.column_sums.astype(float)
    pos = matrix.counts[positive].sum(axis=0)
    return {l: float(pos[j] / sums[j]) if sums[j] else 0.0 for j, l in enumerate(matrix.labels)}


def combination_normalize(vector: EmotionVector) -> np.ndarray:
    """Zero the vector's own component and scale the rest to sum to 1."""
    v = vector.components.astype(float).copy()
    v[vector.labels.index(vector.label)] = 0.0
    total = v.sum()
    if total <= 0:
        raise DegenerateVectorError(f"{vector.label!r} has no off-self mass")
    return v / total


@dataclass(frozen=True)
class EquationRanking:
    target: str
    pairs: tuple  # ((a, b, cosine, rank), ...) best first
    singles: tuple  # ((a, cosine, rank), ...) best first

    @property
    def best_pair(self):
        return self.pairs[0]

    @property
    def best_single(self):
        return self.singles[0]

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["pair", "cosine", "rank"])
            for a, b, c, r in self.pairs:
                w.writerow([f"{a}+{b}", repr(c), r])
            for a, c, r in self.singles:
                w.writerow([a, repr(c), f"single-{r}"])


def equation_similarity(primaries: Sequence[str], targets: Sequence[str], matrix: ClusteringMatrix) -> dict:
    """Rank every unordered pair of primaries by similarity to each target.

    Pair vector = normalised(a) + normalised(b); similarity is the cosine with
    the normalised target vector.  A target that is also listed as a primary
    is left out of its own ranking.  Returns ``{target: EquationRanking}``.
    """
    vecs = {v.label: v for v in emotion_vectors(matrix)}
    for l in list(primaries) + list(targets):
        if l not in vecs:
            raise UnknownLabelError(f"{l!r} is not a matrix label")
    normed = {l: combination_normalize(vecs[l]) for l in set(primaries) | set(targets)}
    out = {}
    for t in targets:
        pool = sorted(p for p in set(primaries) if p != t)
        tv = normed[t]
        pairs = [(a, b, cosine(normed[a] + normed[b], tv)) for a, b in itertools.combinations(pool, 2)]
        pairs.sort(key=lambda x: (-x[2], f"{x[0]}+{x[1]}"))
        singles = [(a, cosine(normed[a], tv)) for a in pool]
        singles.sort(key=lambda x: (-x[1], x[0]))
        out[t] = EquationRanking(
            t,
            tuple((a, b, c, i + 1) for i, (a, b, c) in enumerate(pairs)),
            tuple((a, c, i + 1) for i, (a, c) in enumerate(singles)),
        )
    return out
