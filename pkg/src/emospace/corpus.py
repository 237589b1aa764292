"""Corpus ingestion, phrase filtering, subsampling and stream-rate statistics.

Documents are read from JSON Lines files (one tweet-like record per line),
filtered with per-label rejection phrases plus a handful of global rules, and
subsampled into label-balanced subcorpora either by index modulus or by
time zone of origin.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import re
from collections import Counter, OrderedDict
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from typing import Iterable, Mapping, Sequence

from .errors import EmptyCorpusError, InsufficientDocumentsError, UnknownLabelError

logger = logging.getLogger(__name__)

DEFAULT_SCHEMA = {
    "id": "id",
    "text": "text",
    "label": "emotion",
    "created_at": "created_at",
    "time_zone": "time_zone",
}

_MENTION = re.compile(r"(?:^|\s)[^\w\s@]*@\w")


@dataclass(frozen=True)
class LabelSet:
    """Named, ordered collection of lowercase keywords."""

    name: str
    members: tuple

    def __post_init__(self):
        members = tuple(m.lower() for m in self.members)
        if not members or any(not m for m in members):
            raise ValueError("label set members must be non-empty strings")
        if len(set(members)) != len(members):
            raise ValueError(f"duplicate members in label set {self.name!r}")
        object.__setattr__(self, "members", members)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, label):
        return label in self.members

    def index(self, label):
        return self.members.index(label)

    def without(self, label, name=None):
        return LabelSet(name or self.name, tuple(m for m in self.members if m != label))


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    label: str
    created_at: datetime | None = None
    time_zone: str | None = None
    index: int = 0

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "emotion": self.label,
            "created_at": _format_time(self.created_at),
            "time_zone": self.time_zone,
        }


@dataclass(frozen=True)
class FilterRuleSet:
    """Rejection rules applied before a record enters the corpus.

    ``label_phrases`` maps each label to case-insensitive substrings that
    disqualify a record carrying that label.  ``reject_substrings`` apply to
    every record (case-insensitive), ``reject_tokens`` reject a record when any
    whitespace token equals one of them exactly (case-sensitive, so ``RT``
    does not match "start").
    """

    label_phrases: Mapping[str, Sequence[str]]
    reject_substrings: tuple = ("http://",)
    reject_tokens: tuple = ("RT",)
    reject_mentions: bool = True
    min_tokens: int = 10

    def __post_init__(self):
        if self.min_tokens < 1:
            raise ValueError("min_tokens must be >= 1")
        phrases = OrderedDict()
        for label, items in self.label_phrases.items():
            label = label.lower()
            items = tuple(p.lower() for p in items)
            for p in items:
                if label not in p:
                    raise ValueError(f"phrase {p!r} does not contain its label {label!r}")
            phrases[label] = items
        object.__setattr__(self, "label_phrases", phrases)
        object.__setattr__(self, "reject_substrings", tuple(self.reject_substrings))
        object.__setattr__(self, "reject_tokens", tuple(self.reject_tokens))

    @property
    def labels(self):
        return tuple(self.label_phrases)

    @classmethod
    def from_dict(cls, data: Mapping) -> "FilterRuleSet":
        return cls(
            label_phrases=data["labels"],
            reject_substrings=tuple(data.get("reject_substrings", ("http://",))),
            reject_tokens=tuple(data.get("reject_tokens", ("RT",))),
            reject_mentions=bool(data.get("reject_mentions", True)),
            min_tokens=int(data.get("min_tokens", 10)),
        )

    @classmethod
    def load(cls, path) -> "FilterRuleSet":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "labels": {k: list(v) for k, v in self.label_phrases.items()},
            "reject_substrings": list(self.reject_substrings),
            "reject_tokens": list(self.reject_tokens),
            "reject_mentions": self.reject_mentions,
            "min_tokens": self.min_tokens,
        }

    def rejection_reason(self, text: str, label: str) -> str | None:
        """Name of the first rule ``text`` violates, or None if it is kept."""
        if label not in self.label_phrases:
            raise UnknownLabelError(f"label {label!r} is not covered by the filter rules")
        lowered = text.lower()
        for phrase in self.label_phrases[label]:
            if phrase in lowered:
                return f"phrase:{phrase}"
        for sub in self.reject_substrings:
            if sub.lower() in lowered:
                return f"substring:{sub}"
        tokens = text.split()
        for tok in self.reject_tokens:
            if tok in tokens:
                return f"token:{tok}"
        if self.reject_mentions and _MENTION.search(text):
            return "mention"
        if len(tokens) < self.min_tokens:
            return "min_tokens"
        return None


@dataclass(frozen=True)
class Corpus:
    documents: tuple
    labels: LabelSet
    provenance: str = ""
    rejections: Mapping[str, int] = field(default_factory=dict)
    skipped: int = 0

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        for doc in self.documents:
            if doc.label not in self.labels:
                raise UnknownLabelError(
                    f"document {doc.id!r} has label {doc.label!r} outside {self.labels.name!r}"
                )

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def counts(self) -> dict:
        """Per-label document counts in label-set order (zero counts included)."""
        c = Counter(d.label for d in self.documents)
        return {label: c.get(label, 0) for label in self.labels}

    def by_label(self, label: str) -> list:
        return [d for d in self.documents if d.label == label]

    def restrict(self, labels: LabelSet) -> "Corpus":
        keep = set(labels)
        docs = [d for d in self.documents if d.label in keep]
        return replace(self, documents=docs, labels=labels)

    def take(self, labels: Iterable[str], per_label_limit: int) -> list:
        """First ``per_label_limit`` documents of each label, in index order.

        Raises InsufficientDocumentsError naming the first short label.
        """
        return _take(self.documents, labels, per_label_limit)

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for doc in self.documents:
                fh.write(json.dumps(doc.to_record(), ensure_ascii=False, sort_keys=True))
                fh.write("\n")


def _take(documents, labels, per_label_limit):
    if per_label_limit < 1:
        raise ValueError("per_label_limit must be positive")
    labels = list(labels)
    buckets = {label: [] for label in labels}
    for doc in sorted(documents, key=lambda d: d.index):
        bucket = buckets.get(doc.label)
        if bucket is not None and len(bucket) < per_label_limit:
            bucket.append(doc)
    for label in labels:
        if len(buckets[label]) < per_label_limit:
            raise InsufficientDocumentsError(label, len(buckets[label]), per_label_limit)
    kept = {id(d) for b in buckets.values() for d in b}
    return [d for d in sorted(documents, key=lambda d: d.index) if id(d) in kept]


def parse_time(value) -> datetime | None:
    """Parse ISO-8601 (``Z`` suffix allowed) or Twitter's legacy timestamp format."""
    if value is None or value == "":
        return None
    if isinstance(value, (int, float)):
        return datetime.fromtimestamp(value, tz=timezone.utc)
    text = str(value).strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        dt = datetime.strptime(text, "%a %b %d %H:%M:%S %z %Y")
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def _format_time(dt):
    if dt is None:
        return None
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def read_records(path, schema: Mapping[str, str] | None = None):
    """Yield ``(Document, None)`` for valid lines and ``(None, reason)`` otherwise."""
    keys = dict(DEFAULT_SCHEMA)
    if schema:
        keys.update(schema)
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw.decode("utf-8"))
                text = rec[keys["text"]]
                label = rec[keys["label"]]
                if not isinstance(text, str) or not isinstance(label, str) or not label:
                    raise TypeError("text and label must be strings")
                doc = Document(
                    id=str(rec.get(keys["id"], lineno)),
                    text=text,
                    label=label.strip().lower(),
                    created_at=parse_time(rec.get(keys["created_at"])),
                    time_zone=rec.get(keys["time_zone"]) or None,
                )
            except (UnicodeDecodeError, ValueError, KeyError, TypeError) as exc:
                logger.debug("line %d skipped: %s", lineno, exc)
                yield None, f"line {lineno}: {exc}"
                continue
            yield doc, None


def ingest(path, schema: Mapping[str, str] | None = None, labels: LabelSet | None = None) -> Corpus:
    """Read a JSON Lines corpus file.

    Malformed lines (bad UTF-8, bad JSON, missing fields, bad timestamps) are
    skipped and counted in ``Corpus.skipped``.  When ``labels`` is omitted the
    master label set is the sorted set of labels seen in the file; otherwise
    records with other labels are skipped too.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"corpus file not found: {path}")
    docs, skipped = [], 0
    allowed = set(labels) if labels is not None else None
    for doc, _ in read_records(path, schema):
        if doc is None or (allowed is not None and doc.label not in allowed):
            skipped += 1
            continue
        docs.append(replace(doc, index=len(docs)))
    if not docs:
        raise EmptyCorpusError(f"no valid records in {path}")
    if skipped:
        logger.warning("%s: skipped %d malformed records", path, skipped)
    if labels is None:
        labels = LabelSet("ingested", tuple(sorted({d.label for d in docs})))
    return Corpus(docs, labels, provenance=f"ingested from {os.path.basename(path)}", skipped=skipped)


def apply_filters(records: Iterable[Document], rules: FilterRuleSet, name: str = "filtered") -> Corpus:
    """Keep records passing every rule; re-index survivors from 0.

    Each rejected record is tallied once, under the first rule it violates.
    """
    kept, tally = [], Counter()
    for doc in records:
        reason = rules.rejection_reason(doc.text, doc.label)
        if reason is None:
            kept.append(replace(doc, index=len(kept)))
        else:
            tally[reason] += 1
    labels = LabelSet(name, rules.labels)
    rejections = dict(sorted(tally.items()))
    return Corpus(
        kept,
        labels,
        provenance=f"filtered: {sum(tally.values())} rejected, {len(kept)} kept",
        rejections=rejections,
    )


def write_rejections(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rule", "count"])
        for rule, count in corpus.rejections.items():
            w.writerow([rule, count])


def sample_modulus(corpus: Corpus, modulus: int, residue: int, per_label_limit: int) -> Corpus:
    """Documents with ``index % modulus == residue``, first ``per_label_limit`` per label.

    Original indices are preserved so subsamples can be traced back.
    """
    if modulus < 1:
        raise ValueError("modulus must be positive")
    if not 0 <= residue < modulus:
        raise ValueError("residue must satisfy 0 <= residue < modulus")
    pool = [d for d in corpus.documents if d.index % modulus == residue]
    docs = _take(pool, corpus.labels, per_label_limit)
    return replace(
        corpus,
        documents=docs,
        provenance=f"{corpus.provenance}; MOD{modulus}={residue} limit {per_label_limit}",
        rejections={},
    )


@dataclass(frozen=True)
class TimezoneSample:
    corpus: Corpus
    minimum_count: int
    counts: Mapping[str, int]


def timezone_counts(corpus: Corpus, zone: str) -> dict:
    c = Counter(d.label for d in corpus.documents if d.time_zone == zone)
    return {label: c.get(label, 0) for label in corpus.labels}


def filter_timezone(corpus: Corpus, zone: str, per_label_limit: int | None = None) -> TimezoneSample:
    """Label-balanced subcorpus of documents from one time zone.

    ``minimum_count`` is the smallest per-label count in the zone; passing
    ``per_label_limit=None`` uses it as the limit.
    """
    if not zone:
        raise ValueError("zone must be non-empty")
    counts = timezone_counts(corpus, zone)
    minimum = min(counts.values())
    limit = per_label_limit if per_label_limit is not None else minimum
    if limit < 1:
        short = min(counts, key=counts.get)
        raise InsufficientDocumentsError(short, counts[short], max(limit, 1))
    pool = [d for d in corpus.documents if d.time_zone == zone]
    docs = _take(pool, corpus.labels, limit)
    sub = replace(
        corpus,
        documents=docs,
        provenance=f"{corpus.provenance}; time_zone={zone!r} limit {limit}",
        rejections={},
    )
    return TimezoneSample(sub, minimum, counts)


@dataclass(frozen=True)
class StreamRate:
    label: str
    bucket: timedelta
    series: tuple  # ((bucket start, count), ...)
    mean_per_minute: float

    @property
    def mean_per_hour(self):
        return self.mean_per_minute * 60.0

    def infeasible(self, min_per_hour: float = 1.0) -> bool:
        return self.mean_per_hour < min_per_hour


def stream_rate(corpus: Corpus, label: str, bucket: timedelta | float) -> StreamRate:
    """Arrival counts of ``label`` documents per time bucket.

    Buckets tile ``[first, last]`` starting at the first timestamp; the mean
    rate is the mean bucket count divided by the bucket length in minutes.
    Documents without a timestamp are ignored.
    """
    if not isinstance(bucket, timedelta):
        bucket = timedelta(seconds=float(bucket))
    width = bucket.total_seconds()
    if width <= 0:
        raise ValueError("bucket must be positive")
    times = sorted(d.created_at for d in corpus.documents if d.label == label and d.created_at)
    if not times:
        return StreamRate(label, bucket, (), 0.0)
    start = times[0]
    nbuckets = int(math.floor((times[-1] - start).total_seconds() / width)) + 1
    counts = [0] * nbuckets
    for t in times:
        counts[int((t - start).total_seconds() // width)] += 1
    series = tuple((start + i * bucket, c) for i, c in enumerate(counts))
    mean = (len(times) / nbuckets) / (width / 60.0)
    return StreamRate(label, bucket, series, mean)


def write_stream_rate(rate: StreamRate, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bucket_start", "count"])
        for start, count in rate.series:
            w.writerow([_format_time(start), count])
