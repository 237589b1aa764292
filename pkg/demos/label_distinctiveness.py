"""
How distinct are the labels?
============================

Nearest-neighbour clustering in a joint space, a dimension sweep, and the
greedy reduction that drops the least separable label each round.
"""

import numpy as np

from emospace.corpus import Corpus, Document, LabelSet
from emospace.delsar import cluster, reduce, shuffle_labels, sweep_dimensions

###############################################################################
# Synthetic corpus: four labels with their own vocabulary plus a shared pool.
# "muddled" borrows its words from "calm" and "tense" instead.
rng = np.random.default_rng(0)
own = {name: [f"{name[:3]}{j}" for j in range(15)] for name in ("calm", "tense", "bright")}
shared = [f"w{j}" for j in range(40)]


def sentence(pool):
    return " ".join(pool[rng.integers(len(pool))] if rng.random() < 0.6 else shared[rng.integers(40)]
                    for _ in range(rng.integers(6, 12)))


rows = []
for _ in range(60):
    for name in ("calm", "tense", "bright", "muddled"):
        pool = own[name] if name in own else own[("calm", "tense")[rng.integers(2)]]
        rows.append((sentence(pool), name))
docs = [Document(str(i), t, l, None, None, i) for i, (t, l) in enumerate(rows)]
labels = LabelSet("demo", ("bright", "calm", "muddled", "tense"))
corpus = Corpus(tuple(docs), labels)

###############################################################################
# One clustering run.  Column c of the matrix counts where documents of
# label c found their nearest neighbour.
result = cluster(corpus, labels, 60, 20)
print(result.matrix.counts)
for label, acc in result.accuracy.items():
    print(f"{label:>8}: {acc:.3f}")

###############################################################################
# Mean accuracy across dimensions; the best k is the smallest maximiser.
sweep = sweep_dimensions(corpus, labels, 60, [5, 10, 20, 40])
print({k: round(v, 3) for k, v in sweep.mean_accuracy.items()}, "best k:", sweep.best_k)

###############################################################################
# Reduction rebuilds the space after every removal.
survivors, trace = reduce(corpus, labels, 3, 60, sweep.best_k)
for step in trace:
    print(f"round {step.iteration}: drop {step.removed} ({step.accuracy:.3f})")
print("survivors:", survivors.members)

###############################################################################
# Null model: with labels shuffled, accuracy falls to about one in four.
null = cluster(shuffle_labels(corpus, seed=1), labels, 60, 20)
print("shuffled mean accuracy:", round(null.mean_accuracy, 3))
