import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from emospace.errors import DegenerateCorpusError, DimensionError, EmospaceError
from emospace.semspace import (
    SemanticSpace,
    build_counts,
    build_label_space,
    build_space,
    cosine,
    export_space,
    global_weights,
    load_space,
    log_entropy,
    nearest_document,
    nearest_neighbours,
    tokenize,
    truncated_svd,
)

from conftest import make_docs, oracle_nearest, oracle_weighted_columns, synthetic_corpus


class TestTokenize:
    def test_basic(self):
        assert tokenize("I am SO excited!!") == ["i", "am", "so", "excited"]

    def test_empty(self):
        assert tokenize("") == []

    def test_unstemmed(self):
        assert tokenize("loved loving") == ["loved", "loving"]

    def test_inner_punctuation_kept(self):
        assert tokenize("(don't) ... stop") == ["don't", "stop"]


class TestCounts:
    def test_keyword_removed(self):
        tdm = build_counts(make_docs([("i am happy today", "happy")]))
        assert set(tdm.vocabulary.terms) == {"i", "am", "today"}

    def test_keyword_kept(self):
        tdm = build_counts(make_docs([("i am happy today", "happy")]), remove_label_keyword=False)
        assert set(tdm.vocabulary.terms) == {"i", "am", "happy", "today"}

    def test_block_diagonal(self):
        tdm = build_counts(make_docs([("a b", "x"), ("c d", "x")]))
        dense = tdm.counts.toarray()
        assert dense.tolist() == [[1, 0], [1, 0], [0, 1], [0, 1]]

    def test_column_sums_are_token_counts(self):
        docs = make_docs([("a a b happy", "happy"), ("b c", "sad")])
        tdm = build_counts(docs)
        assert np.asarray(tdm.counts.sum(axis=0)).ravel().tolist() == [3, 2]
        assert np.all(tdm.global_frequency > 0)

    def test_first_occurrence_order(self):
        tdm = build_counts(make_docs([("b a", "x"), ("c a", "x")]))
        assert tdm.vocabulary.terms == ("b", "a", "c")

    def test_degenerate_excluded(self):
        docs = make_docs([("happy", "happy"), ("x y", "happy")])
        with pytest.warns(UserWarning):
            tdm = build_counts(docs)
        assert tdm.degenerate == (0,)
        assert tdm.doc_ids == (1,)


class TestLogEntropy:
    def test_uniform_term_zero_weight(self):
        n = 5
        counts = sp.csc_matrix(np.ones((1, n)))
        assert abs(global_weights(counts)[0]) < 1e-12
        assert np.all(np.abs(log_entropy(counts).toarray()) < 1e-12)

    def test_single_document_term(self):
        counts = sp.csc_matrix(np.array([[1, 0, 0], [1, 1, 1]]))
        g = global_weights(counts)
        assert g[0] == 1.0
        assert log_entropy(counts).toarray()[0, 0] == pytest.approx(math.log(2), abs=1e-15)

    def test_two_one_split(self):
        # scalar oracle for tf = (2, 1) over two documents
        p1, p2 = 2 / 3, 1 / 3
        g_expected = 1 + (p1 * math.log(p1) + p2 * math.log(p2)) / math.log(2)
        assert g_expected == pytest.approx(0.0817, abs=1e-4)
        w = log_entropy(sp.csc_matrix(np.array([[2, 1]]))).toarray()[0]
        assert abs(w[0] - math.log(3) * g_expected) < 1e-9
        assert abs(w[1] - math.log(2) * g_expected) < 1e-9

    def test_needs_two_docs(self):
        with pytest.raises(DegenerateCorpusError):
            global_weights(sp.csc_matrix(np.array([[1]])))

    @settings(max_examples=60, deadline=None)
    @given(arrays(np.int64, st.tuples(st.integers(1, 8), st.integers(2, 8)), elements=st.integers(0, 5)))
    def test_weights_bounded(self, counts):
        counts = counts[counts.sum(axis=1) > 0]
        if counts.shape[0] == 0:
            return
        g = global_weights(sp.csc_matrix(counts))
        assert np.all(g >= -1e-12) and np.all(g <= 1 + 1e-12)


class TestSVD:
    def test_full_rank_exact(self):
        rng = np.random.default_rng(0)
        m = rng.random((30, 20))
        space = build_space(sp.csc_matrix(m), 20)
        recon = space.term_factors @ np.diag(space.sigma) @ space.doc_factors.T
        assert np.linalg.norm(m - recon) / np.linalg.norm(m) <= 1e-8

    def test_rank_one_clipped(self):
        m = np.outer([1.0, 2.0, 3.0], [1.0, 0.5, 2.0, 1.0])
        space = build_space(m, 2)
        assert space.k == 1 and space.requested_k == 2 and space.clipped

    @pytest.mark.parametrize("seed", range(10))
    def test_tail_spectrum(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((50, 40))
        full = np.linalg.svd(m, compute_uv=False)
        space = build_space(m, 10)
        recon = space.term_factors @ np.diag(space.sigma) @ space.doc_factors.T
        assert abs(np.linalg.norm(m - recon) - np.sqrt(np.sum(full[10:] ** 2))) < 1e-6

    def test_invariants(self):
        rng = np.random.default_rng(3)
        space = build_space(rng.random((40, 25)), 12)
        assert np.all(np.diff(space.sigma) <= 0) and np.all(space.sigma > 0)
        assert np.allclose(space.term_factors.T @ space.term_factors, np.eye(12), atol=1e-8)
        assert np.allclose(space.doc_factors.T @ space.doc_factors, np.eye(12), atol=1e-8)

    def test_error_non_increasing_in_k(self):
        rng = np.random.default_rng(4)
        m = rng.random((30, 30))
        errs = []
        for k in range(1, 31, 3):
            s = build_space(m, k)
            errs.append(np.linalg.norm(m - s.term_factors @ np.diag(s.sigma) @ s.doc_factors.T))
        assert all(a >= b - 1e-10 for a, b in zip(errs, errs[1:]))

    def test_sparse_path_matches_dense(self, monkeypatch):
        rng = np.random.default_rng(5)
        m = sp.random(300, 200, density=0.05, random_state=1, format="csc")
        u1, s1, vt1 = truncated_svd(m, 8)
        import emospace.semspace as ss

        monkeypatch.setattr(ss, "DENSE_SVD_LIMIT", 10)
        u2, s2, vt2 = truncated_svd(m, 8)
        assert np.allclose(s1, s2, atol=1e-10)
        assert np.allclose(np.abs(u1.T @ u2), np.eye(8), atol=1e-6)
        # sign convention makes the two solvers agree element-wise
        assert np.allclose(u1, u2, atol=1e-6)

    def test_sign_convention(self):
        rng = np.random.default_rng(6)
        space = build_space(rng.standard_normal((20, 15)), 5)
        t = space.term_factors
        pivots = t[np.argmax(np.abs(t), axis=0), np.arange(5)]
        assert np.all(pivots > 0)

    def test_deterministic(self):
        rng = np.random.default_rng(7)
        m = rng.random((20, 15))
        a, b = build_space(m, 5), build_space(m, 5)
        assert np.array_equal(a.doc_vectors, b.doc_vectors)

    def test_truncate_matches_direct(self):
        rng = np.random.default_rng(8)
        m = rng.random((25, 20))
        direct = build_space(m, 6)
        assert np.allclose(build_space(m, 15).truncate(6).doc_vectors, direct.doc_vectors, atol=1e-10)


class TestCosine:
    def test_identity(self):
        assert cosine([1.0, 2.0], [1.0, 2.0]) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine([1, 0], [0, 1]) == 0.0

    def test_half_angle(self):
        assert abs(cosine([1, 1], [1, 0]) - 0.70711) < 1e-5
        assert abs(cosine([1, 1], [1, 0]) - 1 / math.sqrt(2)) < 1e-9

    def test_zero_vector_flagged(self):
        assert cosine([0, 0], [1, 0], return_flag=True) == (0.0, True)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            cosine([1, 2], [1, 2, 3])

    vec = arrays(np.float64, 6, elements=st.floats(-10, 10, allow_nan=False))

    @settings(max_examples=100, deadline=None)
    @given(vec, vec, st.floats(0.01, 100))
    def test_symmetric_and_scale_invariant(self, x, y, alpha):
        assert abs(cosine(x, y) - cosine(y, x)) <= 1e-12
        if np.linalg.norm(x) > 1e-3 and np.linalg.norm(y) > 1e-3:
            assert abs(cosine(alpha * x, y) - cosine(x, y)) <= 1e-9
        assert -1.0 <= cosine(x, y) <= 1.0


class TestNearest:
    def test_two_identical(self):
        docs = make_docs([("a b c", "x"), ("a b c", "x"), ("d e", "x")])
        space = build_label_space(docs, 3)
        j, c = nearest_document(space, 0)
        assert j == 1 and c == pytest.approx(1.0)
        j, c = nearest_document(space, 1)
        assert j == 0 and c == pytest.approx(1.0)

    def test_single_doc_error(self):
        space = SemanticSpace(np.ones((2, 1)), np.ones(1), np.ones((1, 1)))
        with pytest.raises(EmospaceError):
            nearest_document(space, 0)

    def test_tie_lowest_index(self):
        vectors = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 1.0]])
        idx, _ = nearest_neighbours(vectors)
        assert idx[3] == 0

    @pytest.mark.parametrize("seed", range(5))
    def test_full_rank_matches_brute_force(self, seed):
        corpus = synthetic_corpus(3, 15, seed=seed)
        docs, weighted = oracle_weighted_columns(list(corpus))
        space = build_label_space(list(corpus), 10_000)
        expected = oracle_nearest(weighted)
        idx, cos = nearest_neighbours(space)
        assert idx.tolist() == [j for j, _ in expected]
        assert np.allclose(cos, [c for _, c in expected], atol=1e-9)
        for i in (0, 7, 20):
            assert nearest_document(space, i)[0] == expected[i][0]

    def test_blocked_equals_unblocked(self):
        rng = np.random.default_rng(2)
        v = rng.random((50, 4))
        a = nearest_neighbours(v, block=7)
        b = nearest_neighbours(v, block=1000)
        assert np.array_equal(a[0], b[0]) and np.allclose(a[1], b[1])


def test_export_round_trip(tmp_path):
    corpus = synthetic_corpus(2, 10, seed=3)
    space = build_label_space(list(corpus), 5)
    export_space(space, tmp_path / "space")
    assert sorted(p.name for p in (tmp_path / "space").iterdir()) == ["docs.csv", "meta.json", "sigma.csv", "terms.csv", "vocab.txt"]
    again = load_space(tmp_path / "space")
    assert np.allclose(again.doc_vectors, space.doc_vectors, atol=1e-12, rtol=0)
    assert np.allclose(again.sigma, space.sigma, atol=1e-12, rtol=0)
    assert np.allclose(again.term_factors, space.term_factors, atol=1e-12, rtol=0)
    assert again.vocabulary.terms == space.vocabulary.terms
    assert again.doc_ids == space.doc_ids and again.labels == space.labels
