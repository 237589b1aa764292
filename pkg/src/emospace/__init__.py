"""Semantic distinctiveness of labelled short-text corpora via latent semantic clustering."""

from .corpus import Corpus, Document, FilterRuleSet, LabelSet, apply_filters, filter_timezone, ingest, sample_modulus, stream_rate
from .delsar import ClusteringMatrix, ClusteringResult, cluster, reduce, sweep_dimensions
from .elsa import cohesion, dimension_spread, optimal_set, score_set
from .labelsets import get_labelset
from .semspace import SemanticSpace, build_counts, build_space, cosine, log_entropy, nearest_document, tokenize

__version__ = "0.1.0"
