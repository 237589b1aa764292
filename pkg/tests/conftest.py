import math
import sys
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from emospace.corpus import Corpus, Document, LabelSet

T0 = datetime(2012, 3, 1, tzinfo=timezone.utc)


def make_docs(texts_and_labels, zones=None, start=0):
    docs = []
    for i, (text, label) in enumerate(texts_and_labels):
        docs.append(
            Document(
                id=f"d{start + i}",
                text=text,
                label=label,
                created_at=T0 + timedelta(minutes=start + i),
                time_zone=zones[i] if zones else None,
                index=start + i,
            )
        )
    return docs


def make_corpus(texts_and_labels, labels=None, zones=None):
    docs = make_docs(texts_and_labels, zones)
    labels = labels or LabelSet("test", tuple(dict.fromkeys(l for _, l in texts_and_labels)))
    return Corpus(docs, labels)


def synthetic_corpus(n_labels, n_per_label, seed, vocab_per_label=12, shared_vocab=20,
                     shared_prob=0.5, tokens=(4, 9), interleave=True, include_keyword=True):
    """Random corpus: each label has a private vocabulary plus a shared pool.

    Documents are lowercase words separated by single spaces so an oracle can
    tokenise them with ``str.split``.
    """
    rng = np.random.default_rng(seed)
    names = [f"lab{chr(97 + i)}" for i in range(n_labels)]
    private = {n: [f"{n}w{j}" for j in range(vocab_per_label)] for n in names}
    shared = [f"s{j}" for j in range(shared_vocab)]
    rows = []
    for i in range(n_per_label):
        for n in names:
            length = int(rng.integers(tokens[0], tokens[1] + 1))
            words = [
                shared[rng.integers(len(shared))] if rng.random() < shared_prob else private[n][rng.integers(vocab_per_label)]
                for _ in range(length)
            ]
            if include_keyword:
                words.insert(int(rng.integers(len(words) + 1)), n)
            rows.append((" ".join(words), n))
    if not interleave:
        rows.sort(key=lambda r: r[1])
    return make_corpus(rows, LabelSet("synthetic", tuple(names)))


# -- independent brute-force oracle (no SVD, plain Python) -------------------

def oracle_weighted_columns(docs):
    """Log-entropy weighted column vectors as dicts, own label removed."""
    cols = []
    for d in docs:
        counts = {}
        for w in d.text.split():
            if w != d.label:
                counts[w] = counts.get(w, 0) + 1
        cols.append(counts)
    keep = [i for i, c in enumerate(cols) if c]
    cols = [cols[i] for i in keep]
    n = len(cols)
    gf = {}
    for c in cols:
        for t, v in c.items():
            gf[t] = gf.get(t, 0) + v
    ent = {t: 0.0 for t in gf}
    for c in cols:
        for t, v in c.items():
            p = v / gf[t]
            ent[t] += p * math.log(p)
    g = {t: 1 + ent[t] / math.log(n) for t in gf}
    weighted = [{t: math.log(1 + v) * g[t] for t, v in c.items()} for c in cols]
    return [docs[i] for i in keep], weighted


def oracle_cos(a, b):
    dot = sum(v * b.get(t, 0.0) for t, v in a.items())
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)


def oracle_nearest(weighted, tol=1e-9):
    """For each column: (nearest other column, cosine), lowest index among ties."""
    out = []
    for i, a in enumerate(weighted):
        sims = [oracle_cos(a, b) if j != i else -math.inf for j, b in enumerate(weighted)]
        best = max(sims)
        j = next(j for j, s in enumerate(sims) if s >= best - tol)
        out.append((j, sims[j]))
    return out


@pytest.fixture
def two_label_disjoint():
    return synthetic_corpus(2, 10, seed=1, shared_prob=0.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
