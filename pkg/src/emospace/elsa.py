"""Per-label cohesion: mean nearest-neighbour cosine in a single-label space.

Each label gets its own space built only from that label's documents.  A
tightly clustered label (documents that talk alike) scores close to 1.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import Corpus, LabelSet
from .errors import DegenerateCorpusError
from .semspace import TIE_TOL, build_counts, build_space, log_entropy, nearest_neighbours

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CohesionScore:
    label: str
    k: int
    value: float
    n_docs: int
    requested_k: int = 0
    nearest: np.ndarray = field(default=None, repr=False, compare=False)


def _label_space(corpus, label, per_label_limit, k):
    docs = corpus.take([label], per_label_limit)
    tdm = build_counts(docs, remove_label_keyword=True)
    if tdm.ndocs < 2:
        raise DegenerateCorpusError(f"label {label!r} has fewer than 2 analysable documents")
    return build_space(log_entropy(tdm), k, tdm.vocabulary, tdm.doc_ids, tdm.labels)


def _score(space, label, tol):
    _, cos = nearest_neighbours(space, tol=tol)
    value = float(np.mean(cos))
    if value < 0:
        logger.warning("negative cohesion %.4f for %s at k=%d", value, label, space.k)
    return CohesionScore(label, space.k, value, space.ndocs, space.requested_k, cos)


def cohesion(corpus: Corpus, label: str, per_label_limit: int, k: int, tol: float = TIE_TOL) -> CohesionScore:
    space = _label_space(corpus, label, per_label_limit, k)
    if space.clipped:
        logger.warning("%s: k=%d clipped to rank %d", label, k, space.k)
    return _score(space, label, tol)


def cohesion_profile(corpus: Corpus, label: str, per_label_limit: int, dims: Sequence[int], tol: float = TIE_TOL) -> list:
    """Cohesion at each k in ``dims`` from a single factorisation at max(dims)."""
    dims = [int(d) for d in dims]
    if not dims:
        raise ValueError("dims must be non-empty")
    full = _label_space(corpus, label, per_label_limit, max(dims))
    return [_score(full.truncate(d), label, tol) for d in dims]


@dataclass(frozen=True)
class SetScore:
    labels: LabelSet
    dims: tuple
    score: float
    per_label: dict  # label -> mean over dims
    scores: tuple = ()  # every CohesionScore, label order then dim order

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["label", "dim", "cohesion", "n_docs"])
            for s in self.scores:
                w.writerow([s.label, s.requested_k, repr(s.value), s.n_docs])


def score_set(corpus: Corpus, labels: LabelSet, per_label_limit: int, dims: Sequence[int], tol: float = TIE_TOL) -> SetScore:
    """Unweighted mean over labels of each label's mean cohesion over ``dims``."""
    scores, per_label = [], {}
    for label in labels:
        prof = cohesion_profile(corpus, label, per_label_limit, dims, tol)
        scores.extend(prof)
        per_label[label] = float(np.mean([s.value for s in prof]))
    return SetScore(labels, tuple(dims), float(np.mean(list(per_label.values()))), per_label, tuple(scores))


def rank_labels(per_label: dict) -> list:
    """Labels by descending score, ties lexicographic."""
    return sorted(per_label, key=lambda l: (-per_label[l], l))


def optimal_set(corpus: Corpus, universe: LabelSet, n: int, per_label_limit: int, dims: Sequence[int], tol: float = TIE_TOL) -> LabelSet:
    """The ``n`` most cohesive labels of ``universe``, returned in alphabetical order."""
    if not 1 <= n <= len(universe):
        raise ValueError(f"n must be in [1, {len(universe)}]")
    per_label = score_set(corpus, universe, per_label_limit, dims, tol).per_label
    return LabelSet(f"elsa-optimal-{n}", tuple(sorted(rank_labels(per_label)[:n])))


def dimension_spread(corpus: Corpus, label: str, per_label_limit: int, dims: Sequence[int], tol: float = TIE_TOL):
    """``(mean, population stdev)`` of cohesion across ``dims``."""
    if len(dims) < 2:
        raise ValueError("dimension_spread needs at least 2 dimensions")
    values = np.array([s.value for s in cohesion_profile(corpus, label, per_label_limit, dims, tol)])
    return float(values.mean()), float(values.std(ddof=0))


def write_summary(set_score: SetScore, path) -> None:
    """``label, mean, stdev`` per label (population stdev over dims)."""
    by_label = {}
    for s in set_score.scores:
        by_label.setdefault(s.label, []).append(s.value)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "mean", "stdev"])
        for label in set_score.labels:
            v = np.array(by_label[label])
            w.writerow([label, repr(float(v.mean())), repr(float(v.std(ddof=0)))])
        w.writerow(["MEAN", repr(set_score.score), ""])
