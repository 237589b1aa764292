"""
A log-entropy semantic space
============================

Builds a small term-document matrix, weights it, factorises it and finds
each document's nearest neighbour.
"""

import numpy as np

from emospace.corpus import Document
from emospace.semspace import build_counts, build_space, log_entropy, nearest_neighbours

###############################################################################
# Six short documents, two topics.  The label keyword is removed from each
# document before counting, so "happy" never appears as a term.
texts = [
    ("happy sunny beach holiday", "happy"),
    ("sunny beach with friends", "happy"),
    ("holiday at the beach happy", "happy"),
    ("sad rainy office deadline", "sad"),
    ("rainy monday office again", "sad"),
    ("deadline stress at the office", "sad"),
]
docs = [Document(str(i), t, l, None, None, i) for i, (t, l) in enumerate(texts)]
tdm = build_counts(docs)
print(f"{len(tdm.vocabulary.terms)} terms x {tdm.ndocs} documents")

###############################################################################
# Log-entropy weighting: a term spread evenly over every document gets a
# global weight of 0, a term confined to one document gets 1.
weighted = log_entropy(tdm)
for term in ("beach", "office", "at"):
    row = tdm.vocabulary.index[term]
    print(f"{term:>7}: {np.round(weighted[row].toarray().ravel(), 3)}")

###############################################################################
# Rank-2 space.  Document vectors are the right singular vectors scaled by
# the singular values.
space = build_space(weighted, 2, tdm.vocabulary, tdm.doc_ids, tdm.labels)
print("singular values:", np.round(space.sigma, 3))

idx, cos = nearest_neighbours(space)
for i, (j, c) in enumerate(zip(idx, cos)):
    print(f"doc {i} ({space.labels[i]}) -> doc {j} ({space.labels[j]}), cosine {c:.3f}")
