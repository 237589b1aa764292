"""Weighted term-document matrices and truncated-SVD semantic spaces.

Conventions (fixed here, not taken from any reference corpus):

* tokens are lowercased, split on whitespace and stripped of leading and
  trailing punctuation; no stemming, no stop words;
* the local weight is ``log(1 + tf)`` and the global weight is the entropy
  weight ``1 + sum_j p_ij log p_ij / log(ndocs)`` with ``0 log 0 = 0``;
  all logarithms are natural;
* document vectors are the rows of ``D_k @ diag(sigma_k)``;
* every argmax breaks ties (values within ``TIE_TOL`` of the maximum) by
  lowest index.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import unicodedata
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import svds

from .errors import DegenerateCorpusError, DimensionError, EmospaceError

logger = logging.getLogger(__name__)

TIE_TOL = 1e-9
WEIGHTING_ID = "log-entropy:log1p-tf:natural-log"

# Above this many columns the sparse Lanczos solver replaces the dense SVD.
DENSE_SVD_LIMIT = 2000


def _strip_punct(token):
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list:
    tokens = (_strip_punct(t) for t in text.lower().split())
    return [t for t in tokens if t]


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple
    index: dict = field(repr=False, compare=False)

    @classmethod
    def from_terms(cls, terms):
        terms = tuple(terms)
        index = {t: i for i, t in enumerate(terms)}
        if len(index) != len(terms):
            raise ValueError("vocabulary terms must be unique")
        return cls(terms, index)

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, term):
        return self.index[term]


@dataclass(frozen=True)
class TermDocMatrix:
    """Raw term counts, rows = terms, columns = analysed documents.

    ``doc_ids`` holds the corpus index of each column; ``degenerate`` lists the
    corpus indices of documents dropped because no token survived keyword
    removal.
    """

    counts: sp.csc_matrix
    vocabulary: Vocabulary
    doc_ids: tuple
    labels: tuple
    degenerate: tuple = ()

    @property
    def ndocs(self):
        return self.counts.shape[1]

    @property
    def global_frequency(self):
        return np.asarray(self.counts.sum(axis=1)).ravel()


def build_counts(documents, remove_label_keyword: bool = True, exclude_degenerate: bool = True) -> TermDocMatrix:
    """Count tokens per document.

    ``documents`` is any iterable of objects with ``text``, ``label`` and
    ``index`` attributes (a Corpus or a list of Documents).  With
    ``remove_label_keyword`` every token equal to the document's own label is
    deleted before counting.
    """
    documents = list(documents)
    if not documents:
        raise DegenerateCorpusError("cannot build counts for an empty corpus")
    vocab = {}
    rows, cols = [], []
    doc_ids, labels, degenerate = [], [], []
    for doc in documents:
        tokens = tokenize(doc.text)
        if remove_label_keyword:
            tokens = [t for t in tokens if t != doc.label]
        if not tokens:
            degenerate.append(doc.index)
            if exclude_degenerate:
                continue
        col = len(doc_ids)
        doc_ids.append(doc.index)
        labels.append(doc.label)
        for t in tokens:
            rows.append(vocab.setdefault(t, len(vocab)))
            cols.append(col)
    if degenerate:
        msg = f"{len(degenerate)} documents empty after keyword removal"
        if exclude_degenerate:
            msg += " were excluded"
        warnings.warn(msg, stacklevel=2)
    data = np.ones(len(rows), dtype=np.int64)
    counts = sp.csc_matrix((data, (rows, cols)), shape=(len(vocab), len(doc_ids)), dtype=np.int64)
    counts.sum_duplicates()
    return TermDocMatrix(
        counts=counts,
        vocabulary=Vocabulary.from_terms(vocab),
        doc_ids=tuple(doc_ids),
        labels=tuple(labels),
        degenerate=tuple(degenerate),
    )


def global_weights(counts) -> np.ndarray:
    """Entropy global weight per term, in [0, 1]."""
    counts = sp.csr_matrix(counts, dtype=np.float64)
    ndocs = counts.shape[1]
    if ndocs < 2:
        raise DegenerateCorpusError("log-entropy weighting needs at least 2 documents")
    gf = np.asarray(counts.sum(axis=1)).ravel()
    if np.any(gf <= 0):
        raise DegenerateCorpusError("every term needs a positive global frequency")
    row_of = np.repeat(np.arange(counts.shape[0]), np.diff(counts.indptr))
    p = counts.data / gf[row_of]
    plogp = np.zeros_like(p)
    nz = p > 0
    plogp[nz] = p[nz] * np.log(p[nz])
    entropy = np.bincount(row_of, weights=plogp, minlength=counts.shape[0])
    return 1.0 + entropy / np.log(ndocs)


def log_entropy(matrix) -> sp.csc_matrix:
    """Apply ``log(1 + tf) * G(i)`` to a count matrix (TermDocMatrix or sparse)."""
    counts = matrix.counts if isinstance(matrix, TermDocMatrix) else matrix
    counts = sp.csr_matrix(counts, dtype=np.float64)
    g = global_weights(counts)
    weighted = counts.copy()
    weighted.data = np.log1p(weighted.data)
    weighted = sp.diags(g) @ weighted
    return sp.csc_matrix(weighted)


@dataclass(frozen=True)
class SemanticSpace:
    term_factors: np.ndarray  # |B| x k
    sigma: np.ndarray  # k
    doc_factors: np.ndarray  # ndocs x k
    vocabulary: Vocabulary | None = None
    doc_ids: tuple = ()
    labels: tuple = ()
    requested_k: int = 0
    weighting: str = WEIGHTING_ID

    @property
    def k(self):
        return len(self.sigma)

    @property
    def ndocs(self):
        return self.doc_factors.shape[0]

    @property
    def clipped(self):
        return self.requested_k > self.k

    @property
    def doc_vectors(self):
        return self.doc_factors * self.sigma

    def truncate(self, k: int) -> "SemanticSpace":
        """Space keeping the ``k`` leading dimensions (clipped to this space's k)."""
        if k < 1:
            raise ValueError("k must be positive")
        kk = min(k, self.k)
        return SemanticSpace(
            self.term_factors[:, :kk], self.sigma[:kk], self.doc_factors[:, :kk],
            self.vocabulary, self.doc_ids, self.labels, requested_k=k, weighting=self.weighting,
        )

    def metadata(self) -> dict:
        return {
            "k": self.k,
            "requested_k": self.requested_k,
            "clipped": self.clipped,
            "ndocs": self.ndocs,
            "nterms": int(self.term_factors.shape[0]),
            "weighting": self.weighting,
        }


def _fix_signs(u, vt):
    # largest-magnitude entry of each left singular vector made positive
    pivot = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[pivot, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, vt * signs[:, None]


def truncated_svd(matrix, k: int):
    """Top-``k`` singular triplets, descending, numerically-zero values dropped."""
    m, n = matrix.shape
    kmax = min(m, n)
    if k < 1:
        raise ValueError("k must be positive")
    k = min(k, kmax)
    if min(m, n) <= DENSE_SVD_LIMIT or k >= kmax - 1:
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
        u, s, vt = np.linalg.svd(dense, full_matrices=False)
        u, s, vt = u[:, :k], s[:k], vt[:k]
    else:
        mat = sp.csr_matrix(matrix, dtype=np.float64)
        v0 = np.full(min(m, n), 1.0 / np.sqrt(min(m, n)))
        u, s, vt = svds(mat, k=k, v0=v0, tol=0, random_state=0)
        order = np.argsort(-s, kind="stable")
        u, s, vt = u[:, order], s[order], vt[order]
    if s.size == 0 or s[0] == 0:
        return u[:, :0], s[:0], vt[:0]
    tol = max(m, n) * np.finfo(float).eps * s[0]
    r = int(np.sum(s > tol))
    u, s, vt = u[:, :r], s[:r], vt[:r]
    u, vt = _fix_signs(u, vt)
    return u, s, vt


def build_space(weighted, k: int, vocabulary=None, doc_ids=(), labels=()) -> SemanticSpace:
    """Rank-``k`` factorisation ``weighted ~ T_k diag(sigma_k) D_k^T``.

    ``k`` larger than the numerical rank is clipped; ``space.requested_k``
    keeps the requested value and ``space.clipped`` reports it.
    """
    if isinstance(weighted, TermDocMatrix):
        vocabulary, doc_ids, labels = weighted.vocabulary, weighted.doc_ids, weighted.labels
        weighted = log_entropy(weighted)
    m, n = weighted.shape
    if m == 0 or n == 0:
        raise DegenerateCorpusError("empty matrix")
    u, s, vt = truncated_svd(weighted, k)
    if s.size == 0:
        raise DegenerateCorpusError("weighted matrix is zero")
    if s.size < k:
        logger.info("k=%d clipped to numerical rank %d", k, s.size)
    return SemanticSpace(u, s, vt.T.copy(), vocabulary, tuple(doc_ids), tuple(labels), requested_k=k)


def cosine(x, y, return_flag: bool = False):
    """Cosine similarity; 0.0 (flagged degenerate) when either norm is zero."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise DimensionError(f"length mismatch: {x.size} vs {y.size}")
    nx, ny = np.sqrt(x @ x), np.sqrt(y @ y)
    if nx == 0 or ny == 0:
        return (0.0, True) if return_flag else 0.0
    value = float(np.clip((x @ y) / (nx * ny), -1.0, 1.0))
    return (value, False) if return_flag else value


def first_argmax(values, tol: float = TIE_TOL) -> int:
    """Lowest index whose value is within ``tol`` of the maximum."""
    values = np.asarray(values)
    best = np.max(values)
    return int(np.flatnonzero(values >= best - tol)[0])


def _unit_rows(vectors):
    norms = np.linalg.norm(vectors, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    return vectors / safe[:, None]


def nearest_document(space: SemanticSpace, doc_index: int, tol: float = TIE_TOL):
    """Nearest other document to column ``doc_index`` as ``(index, cosine)``."""
    if space.ndocs < 2:
        raise EmospaceError("nearest_document needs at least 2 documents")
    unit = _unit_rows(space.doc_vectors)
    sims = unit @ unit[doc_index]
    sims[doc_index] = -np.inf
    j = first_argmax(sims, tol)
    return j, float(sims[j])


def nearest_neighbours(space_or_vectors, tol: float = TIE_TOL, block: int = 1024):
    """Nearest other row for every row of the document-vector matrix.

    Returns ``(indices, cosines)`` arrays.  Work is blocked so memory stays
    O(block * ndocs).
    """
    vectors = space_or_vectors.doc_vectors if isinstance(space_or_vectors, SemanticSpace) else space_or_vectors
    vectors = np.asarray(vectors, dtype=float)
    n = vectors.shape[0]
    if n < 2:
        raise EmospaceError("nearest-neighbour search needs at least 2 documents")
    unit = _unit_rows(vectors)
    idx = np.empty(n, dtype=np.int64)
    best = np.empty(n)
    for start in range(0, n, block):
        stop = min(n, start + block)
        sims = unit[start:stop] @ unit.T
        rows = np.arange(stop - start)
        sims[rows, np.arange(start, stop)] = -np.inf
        top = sims.max(axis=1)
        # first column within tol of the row maximum
        cand = sims >= (top - tol)[:, None]
        j = cand.argmax(axis=1)
        idx[start:stop] = j
        best[start:stop] = np.clip(sims[rows, j], -1.0, 1.0)
    return idx, best


def build_label_space(documents, k: int, remove_label_keyword: bool = True) -> SemanticSpace:
    """Counts, log-entropy weighting and truncated SVD in one call."""
    tdm = build_counts(documents, remove_label_keyword=remove_label_keyword)
    if tdm.ndocs < 2:
        raise DegenerateCorpusError("fewer than 2 analysable documents")
    return build_space(log_entropy(tdm), k, tdm.vocabulary, tdm.doc_ids, tdm.labels)


def _write_rows(path, rows, header=None):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def export_space(space: SemanticSpace, directory) -> None:
    """Write ``vocab.txt``, ``sigma.csv``, ``docs.csv``, ``terms.csv``, ``meta.json``."""
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "vocab.txt"), "w", encoding="utf-8", newline="\n") as fh:
        for term in (space.vocabulary.terms if space.vocabulary else ()):
            fh.write(term + "\n")
    dims = [f"d{i + 1}" for i in range(space.k)]
    _write_rows(os.path.join(directory, "sigma.csv"), ([s] for s in space.sigma), ["sigma"])
    _write_rows(os.path.join(directory, "docs.csv"), space.doc_vectors, dims)
    _write_rows(os.path.join(directory, "terms.csv"), space.term_factors, dims)
    meta = dict(space.metadata(), doc_ids=list(space.doc_ids), labels=list(space.labels))
    with open(os.path.join(directory, "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_rows(path, ncols):
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        next(r)
        rows = [[float(v) for v in row] for row in r]
    return np.array(rows, dtype=float).reshape(len(rows), ncols)


def load_space(directory) -> SemanticSpace:
    with open(os.path.join(directory, "meta.json"), encoding="utf-8") as fh:
        meta = json.load(fh)
    with open(os.path.join(directory, "vocab.txt"), encoding="utf-8") as fh:
        terms = [line.rstrip("\n") for line in fh]
    k = meta["k"]
    sigma = _read_rows(os.path.join(directory, "sigma.csv"), 1).ravel()
    docs = _read_rows(os.path.join(directory, "docs.csv"), k)
    terms_f = _read_rows(os.path.join(directory, "terms.csv"), k)
    return SemanticSpace(
        terms_f, sigma, docs / sigma, Vocabulary.from_terms(terms) if terms else None,
        tuple(meta.get("doc_ids", ())), tuple(meta.get("labels", ())),
        requested_k=meta.get("requested_k", k), weighting=meta.get("weighting", WEIGHTING_ID),
    )
