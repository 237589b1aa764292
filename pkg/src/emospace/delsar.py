"""Nearest-neighbour label clustering in a joint semantic space.

Every document is assigned the label of its nearest other document (cosine
over LSA document vectors, own-label keyword removed).  The resulting
label x label count matrix gives per-label accuracies; the reduction loop
repeatedly drops the least accurate label and rebuilds the space.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .corpus import Corpus, LabelSet
from .errors import DegenerateCorpusError, EmospaceError
from .semspace import TIE_TOL, SemanticSpace, build_counts, build_space, log_entropy, nearest_neighbours

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusteringMatrix:
    """``counts[r, c]``: documents labelled ``labels[c]`` whose nearest neighbour is labelled ``labels[r]``."""

    labels: tuple
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1] or counts.shape[0] != len(self.labels):
            raise ValueError("clustering matrix must be square and match its labels")
        if np.any(counts < 0):
            raise ValueError("clustering counts must be non-negative")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "counts", counts)

    def index(self, label):
        return self.labels.index(label)

    def column(self, label) -> np.ndarray:
        return self.counts[:, self.index(label)]

    @property
    def hits(self):
        return np.diag(self.counts)

    @property
    def column_sums(self):
        return self.counts.sum(axis=0)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([""] + list(self.labels))
            for label, row in zip(self.labels, self.counts):
                w.writerow([label] + [int(v) for v in row])

    @classmethod
    def from_csv(cls, path) -> "ClusteringMatrix":
        with open(path, encoding="utf-8-sig", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if len(rows) < 2:
            raise ValueError(f"{path}: matrix CSV needs a header and at least one row")
        header = [h.strip() for h in rows[0][1:]]
        row_labels = [r[0].strip() for r in rows[1:]]
        if header != row_labels:
            raise ValueError(f"{path}: row labels do not match header labels")
        try:
            counts = np.array([[int(v) for v in r[1:]] for r in rows[1:]], dtype=np.int64)
        except ValueError as exc:
            raise ValueError(f"{path}: non-integer cell ({exc})") from None
        if counts.shape != (len(header), len(header)):
            raise ValueError(f"{path}: ragged matrix")
        return cls(tuple(header), counts)


@dataclass(frozen=True)
class ClusteringResult:
    label_set: LabelSet
    k: int
    requested_k: int
    matrix: ClusteringMatrix
    assignments: dict  # corpus index -> nearest neighbour's label
    nearest: dict  # corpus index -> (nearest corpus index, cosine)
    per_label_limit: int
    excluded: tuple = ()

    @property
    def hits(self) -> dict:
        return dict(zip(self.matrix.labels, (int(h) for h in self.matrix.hits)))

    @property
    def analysed(self) -> dict:
        return dict(zip(self.matrix.labels, (int(c) for c in self.matrix.column_sums)))

    def accuracy_fraction(self, label) -> Fraction:
        n = self.analysed[label]
        return Fraction(self.hits[label], n) if n else Fraction(0)

    @property
    def accuracy(self) -> dict:
        return {label: float(self.accuracy_fraction(label)) for label in self.matrix.labels}

    @property
    def mean_accuracy(self) -> float:
        acc = self.accuracy
        return float(np.mean(list(acc.values())))

    def to_accuracy_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["label", "hits", "analysed", "accuracy"])
            hits, analysed, acc = self.hits, self.analysed, self.accuracy
            for label in self.matrix.labels:
                w.writerow([label, hits[label], analysed[label], repr(acc[label])])
            w.writerow(["MEAN", sum(hits.values()), sum(analysed.values()), repr(self.mean_accuracy)])


def cluster(corpus: Corpus, labels: LabelSet, per_label_limit: int, k: int, tol: float = TIE_TOL) -> ClusteringResult:
    """Cluster the first ``per_label_limit`` documents of each label.

    One space is built over the whole subcorpus with own-label keywords
    removed.  Documents left empty by keyword removal are excluded and listed
    in ``result.excluded``; accuracies use the documents actually analysed.
    """
    docs = corpus.take(labels, per_label_limit)
    tdm = build_counts(docs, remove_label_keyword=True)
    if tdm.ndocs < 2:
        raise DegenerateCorpusError("fewer than 2 analysable documents")
    space = build_space(log_entropy(tdm), k, tdm.vocabulary, tdm.doc_ids, tdm.labels)
    return _cluster_space(space, labels, per_label_limit, tdm.degenerate, tol)


def _cluster_space(space: SemanticSpace, labels: LabelSet, per_label_limit, excluded, tol) -> ClusteringResult:
    order = {label: i for i, label in enumerate(labels)}
    idx, cos = nearest_neighbours(space, tol=tol)
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    own = np.array([order[l] for l in space.labels])
    np.add.at(counts, (own[idx], own), 1)
    assignments = {space.doc_ids[i]: space.labels[j] for i, j in enumerate(idx)}
    nearest = {space.doc_ids[i]: (space.doc_ids[j], float(c)) for i, (j, c) in enumerate(zip(idx, cos))}
    return ClusteringResult(
        label_set=labels,
        k=space.k,
        requested_k=space.requested_k,
        matrix=ClusteringMatrix(tuple(labels), counts),
        assignments=assignments,
        nearest=nearest,
        per_label_limit=per_label_limit,
        excluded=tuple(excluded),
    )


@dataclass(frozen=True)
class ReductionStep:
    iteration: int
    removed: str
    accuracy: float
    surviving: tuple
    mean_accuracy: float


@dataclass(frozen=True)
class ReductionTrace:
    steps: tuple = ()
    results: tuple = field(default=(), repr=False)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "removed", "accuracy", "mean_accuracy", "surviving"])
            for s in self.steps:
                w.writerow([s.iteration, s.removed, repr(s.accuracy), repr(s.mean_accuracy), " ".join(s.surviving)])


def least_accurate(result: ClusteringResult) -> str:
    """Minimum-accuracy label, ties broken lexicographically (exact rational comparison)."""
    return min(result.matrix.labels, key=lambda l: (result.accuracy_fraction(l), l))


def reduce(corpus: Corpus, labels: LabelSet, reduce_to: int, per_label_limit: int, k: int, tol: float = TIE_TOL):
    """Drop the least accurate label until ``reduce_to`` remain.

    The space is rebuilt from scratch for every intermediate set.  Returns
    the surviving LabelSet and the ReductionTrace.
    """
    if reduce_to < 1 or reduce_to > len(labels):
        raise ValueError(f"reduce_to must be in [1, {len(labels)}]")
    current = labels
    steps, results = [], []
    iteration = 0
    while len(current) > reduce_to:
        iteration += 1
        result = cluster(corpus, current, per_label_limit, k, tol)
        removed = least_accurate(result)
        acc = result.accuracy[removed]
        current = current.without(removed)
        logger.info("reduction %d: removed %s (accuracy %.3f)", iteration, removed, acc)
        steps.append(ReductionStep(iteration, removed, acc, tuple(current), result.mean_accuracy))
        results.append(result)
    return current, ReductionTrace(tuple(steps), tuple(results))


@dataclass(frozen=True)
class SweepResult:
    mean_accuracy: dict  # k -> mean accuracy
    best_k: int
    results: dict = field(repr=False, default_factory=dict)


def sweep_dimensions(corpus: Corpus, labels: LabelSet, per_label_limit: int, dims: Sequence[int], tol: float = TIE_TOL) -> SweepResult:
    """Mean accuracy for every k in ``dims``; best k is the smallest maximiser.

    The space is factorised once at ``max(dims)`` and truncated for smaller
    k, which yields the same leading singular triplets.
    """
    dims = [int(d) for d in dims]
    if not dims:
        raise ValueError("dims must be non-empty")
    if any(d < 1 for d in dims):
        raise ValueError("dimensions must be positive")
    docs = corpus.take(labels, per_label_limit)
    tdm = build_counts(docs, remove_label_keyword=True)
    if tdm.ndocs < 2:
        raise DegenerateCorpusError("fewer than 2 analysable documents")
    full = build_space(log_entropy(tdm), max(dims), tdm.vocabulary, tdm.doc_ids, tdm.labels)
    means, results = {}, {}
    for d in dims:
        res = _cluster_space(full.truncate(d), labels, per_label_limit, tdm.degenerate, tol)
        results[d] = res
        means[d] = res.mean_accuracy
    best = max(means.values())
    best_k = min(d for d in dims if means[d] == best)
    return SweepResult(means, best_k, results)


def shuffle_labels(corpus: Corpus, seed: int) -> Corpus:
    """Null model: permute document labels uniformly at random (seeded)."""
    from dataclasses import replace

    rng = np.random.default_rng(seed)
    labels = [d.label for d in corpus.documents]
    perm = rng.permutation(len(labels))
    docs = [replace(d, label=labels[p]) for d, p in zip(corpus.documents, perm)]
    return replace(corpus, documents=docs, provenance=f"{corpus.provenance}; labels shuffled seed={seed}")
