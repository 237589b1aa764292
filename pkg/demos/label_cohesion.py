"""
Cohesion within a label
=======================

Each label gets its own space; cohesion is the mean cosine between every
document and its nearest same-label neighbour.
"""

import numpy as np

from emospace.corpus import Corpus, Document, LabelSet
from emospace.elsa import cohesion, dimension_spread, optimal_set, score_set

###############################################################################
# Labels differ only in how varied their vocabulary is: "routine" reuses a
# handful of words, "scattered" draws from hundreds.
rng = np.random.default_rng(3)
sizes = {"routine": 8, "steady": 30, "varied": 120, "scattered": 400}
rows = []
for name, size in sizes.items():
    pool = [f"{name[:2]}{j}" for j in range(size)]
    rows += [(" ".join(pool[rng.integers(size)] for _ in range(8)), name) for _ in range(50)]
docs = [Document(str(i), t, l, None, None, i) for i, (t, l) in enumerate(rows)]
labels = LabelSet("demo", tuple(sorted(sizes)))
corpus = Corpus(tuple(docs), labels)

###############################################################################
# Cohesion at a single dimension.
for name in labels:
    print(f"{name:>9}: {cohesion(corpus, name, 50, 20).value:.3f}")

###############################################################################
# Averaged over k = 10, 20, ..., 40, together with the spread across k.
dims = [10, 20, 30, 40]
scores = score_set(corpus, labels, 50, dims)
for name in labels:
    mean, sd = dimension_spread(corpus, name, 50, dims)
    print(f"{name:>9}: mean {mean:.3f}  stdev {sd:.3f}")
print("set score:", round(scores.score, 3))

###############################################################################
# The two most cohesive labels, reported alphabetically.
print("optimal pair:", optimal_set(corpus, labels, 2, 50, dims).members)
