"""
Filtering a labelled harvest
============================

Raw keyword-harvested records are noisy: retweets, links, negated keywords
("not happy") and very short messages.  This walk-through filters a handful
of records, then looks at sampling and stream rates.
"""

import json
import tempfile
from pathlib import Path

from emospace.affect import data_path
from emospace.corpus import FilterRuleSet, LabelSet, apply_filters, ingest, sample_modulus, stream_rate

###############################################################################
# A tiny harvest written as JSON Lines.  The label key defaults to "emotion".
filler = "and the rest of the day went on much as it usually does"
records = [
    {"id": "1", "text": f"so happy this morning {filler}", "emotion": "happy", "created_at": "2012-03-01T09:00:00Z"},
    {"id": "2", "text": f"not happy with the bus {filler}", "emotion": "happy", "created_at": "2012-03-01T09:05:00Z"},
    {"id": "3", "text": f"RT feeling sad {filler}", "emotion": "sad", "created_at": "2012-03-01T09:07:00Z"},
    {"id": "4", "text": f"sad news http://t.co/x {filler}", "emotion": "sad", "created_at": "2012-03-01T09:30:00Z"},
    {"id": "5", "text": "sad", "emotion": "sad", "created_at": "2012-03-01T09:45:00Z"},
    {"id": "6", "text": f"quietly sad tonight {filler}", "emotion": "sad", "created_at": "2012-03-01T10:10:00Z"},
]
for n in range(7, 15):
    label = ("happy", "sad")[n % 2]
    records.append({"id": str(n), "text": f"feeling {label} again {filler}", "emotion": label,
                    "created_at": f"2012-03-01T{10 + n // 4:02d}:{(n * 7) % 60:02d}:00Z"})
workdir = Path(tempfile.mkdtemp())
raw_path = workdir / "raw.jsonl"
raw_path.write_text("\n".join(json.dumps(r) for r in records) + "\n")

raw = ingest(raw_path)
print(f"{len(raw)} records read, {raw.skipped} malformed")

###############################################################################
# The bundled rule table lists negating phrases per label plus the global
# rules.  Each rejected record is tallied under the first rule it breaks.
rules = FilterRuleSet.load(data_path("filter_rules.json"))
kept = apply_filters(raw.documents, rules)
print("kept:", [d.id for d in kept.documents])
for rule, n in kept.rejections.items():
    print(f"  rejected by {rule}: {n}")

###############################################################################
# Survivors are re-indexed 0..n-1.  The rule table covers 21 labels, so
# restrict to the two present here before sampling.  A modulus sample keeps
# every m-th document of each label, starting at the residue.
kept = kept.restrict(LabelSet("demo", ("happy", "sad")))
sub = sample_modulus(kept, 2, 0, 1)
print("modulus sample:", [(d.label, d.index) for d in sub.documents])

###############################################################################
# Stream rate: documents per bucket over the label's time span.
rate = stream_rate(raw, "sad", 600)
print(f"sad: {rate.mean_per_minute:.3f} per minute over {len(rate.series)} ten-minute buckets")
