"""
An emotion space from a clustering matrix
=========================================

The package ships a 21-emotion clustering matrix built from 1100 documents
per emotion.  Its columns are emotion vectors; this walk-through compares
them, scales them into two dimensions, profiles one emotion and tries
adding pairs of emotions together.
"""

from emospace.affect import (
    ValenceMap,
    classical_mds,
    emotion_vectors,
    equation_similarity,
    load_bundled_matrix,
    load_primaries,
    profile,
    similarity_matrix,
)

matrix = load_bundled_matrix()
vectors = emotion_vectors(matrix)
print({v.label: round(v.magnitude, 2) for v in vectors[:4]})

###############################################################################
# Pairwise cosine similarity of the raw columns.
sim = similarity_matrix(vectors)
i, j = matrix.index("depressed"), matrix.index("stressed")
print(f"depressed vs stressed: {sim.values[i, j]:.3f}")

###############################################################################
# Classical scaling with dissimilarity 1 - cosine.
mds = classical_mds(sim, 2)
print(f"2-D stress {mds.stress:.3f}, 3-D stress {classical_mds(sim, 3).stress:.3f}")
for label, (x, y) in list(zip(mds.labels, mds.coordinates))[:5]:
    print(f"{label:>12}: ({x:+.3f}, {y:+.3f})")

###############################################################################
# A radar profile over the circumplex ordering.  The profiled emotion's own
# slot holds the mean of its two neighbours so it does not dominate.
vmap = ValenceMap.load()
happy = profile(matrix, "happy", vmap, normalized=True)
print("happy positivity:", round(happy.positivity, 3))
print({l: round(float(r), 3) for l, r in zip(happy.positions[:6], happy.radials[:6])})

###############################################################################
# Emotion equations: zero each vector's own component, scale to sum 1, add
# pairs of primaries and compare with the target.
rankings = equation_similarity(load_primaries(), ["depressed", "guilty"], matrix)
for target, r in rankings.items():
    a, b, c, _ = r.best_pair
    s, sc, _ = r.best_single
    print(f"{target}: best pair {a}+{b} ({c:.3f}), best single {s} ({sc:.3f})")
