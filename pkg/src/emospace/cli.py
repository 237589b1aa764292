"""Command-line front end.

Subcommands: ingest, sample, esr, delsar, elsa, affect.  Every command takes
``--config run.json`` (keys named like the long flags, dashes as
underscores); explicit flags override the file.  Exit codes: 0 ok, 1 usage,
2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import warnings
from dataclasses import dataclass, field, fields

from . import affect, corpus as corpus_mod, delsar, elsa
from .corpus import FilterRuleSet, apply_filters, filter_timezone, ingest, sample_modulus, stream_rate
from .errors import EmospaceError
from .labelsets import resolve_labelset

SCHEMA_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

logger = logging.getLogger("emospace")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_dims(text) -> list:
    """``"10:100:10"`` (inclusive range), ``"10,20,50"`` or ``"50"``."""
    if isinstance(text, (list, tuple)):
        dims = [int(d) for d in text]
    else:
        text = str(text).strip()
        if not text:
            raise UsageError("dimension list is empty")
        try:
            if ":" in text:
                parts = [int(p) for p in text.split(":")]
                if len(parts) == 2:
                    parts.append(1)
                start, stop, step = parts
                if step < 1 or stop < start:
                    raise ValueError
                dims = list(range(start, stop + 1, step))
            else:
                dims = [int(p) for p in text.split(",") if p.strip()]
        except ValueError:
            raise UsageError(f"bad dimension spec {text!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise UsageError("dimensions must be a non-empty list of positive integers")
    return dims


@dataclass
class RunConfig:
    corpus: str | None = None
    schema: dict = field(default_factory=dict)
    set: str = "all21"
    limit: int | None = None
    k: int | None = None
    sweep: str | None = None
    dims: str | None = None
    reduce_to: int | None = None
    optimal: int | None = None
    modulus: int | None = None
    residue: int = 0
    timezone: str | None = None
    out: str = "."
    seed: int = 0
    shuffle_labels: bool = False

    @classmethod
    def resolve(cls, args) -> "RunConfig":
        base = {}
        if getattr(args, "config", None):
            with open(args.config, encoding="utf-8") as fh:
                base = json.load(fh)
            unknown = set(base) - {f.name for f in fields(cls)}
            if unknown:
                raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = cls(**base)
        for f in fields(cls):
            value = getattr(args, f.name, None)
            if value is not None and value is not False:
                setattr(cfg, f.name, value)
        return cfg


def _emit(args, summary, lines):
    if args.json:
        summary = dict(schema_version=SCHEMA_VERSION, command=args.command, **summary)
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _schema_arg(values):
    schema = {}
    for item in values or ():
        if "=" not in item:
            raise UsageError(f"schema mapping must look like field=key, got {item!r}")
        k, v = item.split("=", 1)
        if k not in corpus_mod.DEFAULT_SCHEMA:
            raise UsageError(f"unknown schema field {k!r}")
        schema[k] = v
    return schema


def cmd_ingest(args):
    rules = FilterRuleSet.load(args.rules or affect.data_path("filter_rules.json"))
    raw = ingest(args.input, _schema_arg(args.schema))
    result = apply_filters(raw.documents, rules)
    if not len(result):
        raise EmospaceError("every record was rejected by the filter rules")
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    result.write_jsonl(args.out)
    rej_path = args.rejections or os.path.join(out_dir, "rejections.csv")
    corpus_mod.write_rejections(result, rej_path)
    counts = result.counts()
    summary = {
        "input_records": len(raw) + raw.skipped,
        "malformed": raw.skipped,
        "accepted": len(result),
        "rejections": dict(result.rejections),
        "label_counts": counts,
        "output": args.out,
    }
    lines = [f"{len(result)} accepted, {sum(result.rejections.values())} rejected, {raw.skipped} malformed"]
    lines += [f"  {label}: {n}" for label, n in counts.items()]
    lines += [f"  rejected {rule}: {n}" for rule, n in result.rejections.items()]
    _emit(args, summary, lines)


def _load_corpus(cfg, labels=None):
    if not cfg.corpus:
        raise UsageError("a corpus path is required (--corpus or config 'corpus')")
    return ingest(cfg.corpus, cfg.schema or None, labels)


def _apply_sampling(corp, cfg):
    if cfg.modulus is not None and cfg.timezone:
        raise UsageError("choose either --modulus or --timezone, not both")
    if cfg.modulus is not None:
        if cfg.limit is None:
            raise UsageError("--modulus needs --limit")
        return sample_modulus(corp, cfg.modulus, cfg.residue, cfg.limit), cfg.limit
    if cfg.timezone:
        ts = filter_timezone(corp, cfg.timezone, cfg.limit)
        return ts.corpus, cfg.limit or ts.minimum_count
    if cfg.limit is None:
        raise UsageError("--limit is required")
    return corp, cfg.limit


def _prepare(args):
    cfg = RunConfig.resolve(args)
    try:
        labels = resolve_labelset(cfg.set)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    corp = _load_corpus(cfg).restrict(labels)
    corp = corpus_mod.Corpus(corp.documents, labels, corp.provenance)
    if cfg.shuffle_labels:
        corp = delsar.shuffle_labels(corp, cfg.seed)
    corp, limit = _apply_sampling(corp, cfg)
    os.makedirs(cfg.out, exist_ok=True)
    return cfg, labels, corp, limit


def cmd_sample(args):
    cfg = RunConfig.resolve(args)
    corp = _load_corpus(cfg)
    if cfg.set != "all21" or args.set:
        labels = resolve_labelset(cfg.set)
        corp = corpus_mod.Corpus(corp.restrict(labels).documents, labels, corp.provenance)
    sub, limit = _apply_sampling(corp, cfg)
    os.makedirs(os.path.dirname(os.path.abspath(args.output)), exist_ok=True)
    sub.write_jsonl(args.output)
    summary = {"documents": len(sub), "per_label_limit": limit, "label_counts": sub.counts(), "provenance": sub.provenance}
    _emit(args, summary, [f"{len(sub)} documents written to {args.output} ({sub.provenance})"])


def cmd_esr(args):
    cfg = RunConfig.resolve(args)
    corp = _load_corpus(cfg)
    labels = [args.label] if args.label else list(corp.labels)
    os.makedirs(cfg.out, exist_ok=True)
    rates, lines = {}, []
    for label in labels:
        rate = stream_rate(corp, label, args.bucket)
        corpus_mod.write_stream_rate(rate, os.path.join(cfg.out, f"esr_{label}.csv"))
        rates[label] = {
            "per_minute": rate.mean_per_minute,
            "per_hour": rate.mean_per_hour,
            "infeasible": rate.infeasible(),
            "buckets": len(rate.series),
        }
        flag = "  (below 1/hour)" if rate.infeasible() else ""
        lines.append(f"{label}: {rate.mean_per_minute:.4f} docs/min{flag}")
    _emit(args, {"bucket_seconds": args.bucket, "rates": rates}, lines)


def cmd_delsar(args):
    cfg, labels, corp, limit = _prepare(args)
    if cfg.k is None and cfg.sweep is None:
        raise UsageError("give --k or --sweep")
    summary = {"set": list(labels), "per_label_limit": limit, "seed": cfg.seed, "shuffled": cfg.shuffle_labels}
    lines = []
    if cfg.sweep is not None:
        dims = parse_dims(cfg.sweep)
        sweep = delsar.sweep_dimensions(corp, labels, limit, dims)
        with open(os.path.join(cfg.out, "sweep.csv"), "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "mean_accuracy"])
            for d in dims:
                w.writerow([d, repr(sweep.mean_accuracy[d])])
        k = sweep.best_k
        summary["sweep"] = {str(d): sweep.mean_accuracy[d] for d in dims}
        summary["best_k"] = k
        lines.append(f"best k = {k} (mean accuracy {sweep.mean_accuracy[k]:.3f})")
        result = sweep.results[k]
    else:
        k = cfg.k
        result = delsar.cluster(corp, labels, limit, k)
    result.matrix.to_csv(os.path.join(cfg.out, "clustering_matrix.csv"))
    result.to_accuracy_csv(os.path.join(cfg.out, "accuracy.csv"))
    summary.update(k=result.k, requested_k=result.requested_k, accuracy=result.accuracy,
                   mean_accuracy=result.mean_accuracy, excluded=len(result.excluded))
    lines += [f"{l}: {a:.3f}" for l, a in result.accuracy.items()]
    lines.append(f"MEAN: {result.mean_accuracy:.3f}")
    if cfg.reduce_to is not None:
        surviving, trace = delsar.reduce(corp, labels, cfg.reduce_to, limit, k)
        trace.to_csv(os.path.join(cfg.out, "trace.csv"))
        summary["reduced_set"] = list(surviving)
        summary["removed"] = [s.removed for s in trace]
        lines.append(f"reduced set: {' '.join(surviving)}")
    _emit(args, summary, lines)


def cmd_elsa(args):
    cfg, labels, corp, limit = _prepare(args)
    dims = parse_dims(cfg.dims if cfg.dims is not None else (cfg.k if cfg.k is not None else "10:100:10"))
    scores = elsa.score_set(corp, labels, limit, dims)
    scores.to_csv(os.path.join(cfg.out, "elsa.csv"))
    elsa.write_summary(scores, os.path.join(cfg.out, "elsa_summary.csv"))
    summary = {"set": list(labels), "dims": dims, "per_label_limit": limit, "per_label": scores.per_label,
               "score": scores.score, "stdev": "population"}
    lines = [f"{l}: {v:.3f}" for l, v in scores.per_label.items()] + [f"MEAN: {scores.score:.3f}"]
    if cfg.optimal is not None:
        if not 1 <= cfg.optimal <= len(labels):
            raise UsageError(f"--optimal must be in [1, {len(labels)}]")
        best = sorted(elsa.rank_labels(scores.per_label)[: cfg.optimal])
        with open(os.path.join(cfg.out, "optimal.txt"), "w", encoding="utf-8") as fh:
            fh.write("\n".join(best) + "\n")
        summary["optimal"] = best
        lines.append("optimal: " + " ".join(best))
    _emit(args, summary, lines)


def cmd_affect(args):
    try:
        matrix = delsar.ClusteringMatrix.from_csv(args.matrix or affect.data_path("delsar1100.csv"))
    except ValueError as exc:
        raise EmospaceError(str(exc)) from None
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    do_sim = args.all or args.similarity
    mds_dims = [2, 3] if args.all and not args.mds else (args.mds or [])
    do_prof = args.all or args.profiles is not None
    do_eq = args.all or args.equations
    if not (do_sim or mds_dims or do_prof or do_eq):
        raise UsageError("nothing to do: pass --all, --similarity, --mds, --profiles or --equations")
    vectors = affect.emotion_vectors(matrix)
    summary = {"labels": list(matrix.labels), "magnitudes": {v.label: v.magnitude for v in vectors}}
    lines = []
    sim = affect.similarity_matrix(vectors)
    if do_sim:
        sim.to_csv(os.path.join(out, "similarity.csv"))
        lines.append(f"similarity.csv: {len(matrix.labels)} x {len(matrix.labels)}")
    for d in mds_dims:
        res = affect.classical_mds(sim, d)
        name = "mds.csv" if len(mds_dims) == 1 else f"mds{d}d.csv"
        res.to_csv(os.path.join(out, name))
        summary.setdefault("mds", {})[str(d)] = {"stress": res.stress, "clipped_eigenvalues": list(res.clipped_eigenvalues),
                                                  "dissimilarity": res.dissimilarity}
        lines.append(f"{name}: stress {res.stress:.4f}")
    if do_prof:
        vmap = affect.ValenceMap.load(args.vmap)
        wanted = vmap.ordering if not args.profiles or args.profiles == "all" else args.profiles.split(",")
        pos = {}
        for label in wanted:
            p = affect.profile(matrix, label.strip(), vmap, normalized=args.normalized)
            p.to_csv(os.path.join(out, f"profile_{p.label}.csv"))
            pos[p.label] = p.positivity
        summary["profile_positivity"] = pos
        summary["theoretical_positivity"] = affect.theoretical_positivity(matrix, vmap)
        lines.append(f"{len(pos)} profiles written")
    if do_eq:
        prim = args.primaries
        primaries = affect.load_primaries(prim) if prim and os.path.exists(prim) else (
            tuple(p.strip() for p in prim.split(",")) if prim else affect.load_primaries())
        targets = tuple(t.strip() for t in (args.targets or "depressed,disgusted,guilty").split(","))
        rankings = affect.equation_similarity(primaries, targets, matrix)
        summary["equations"] = {}
        for t, r in rankings.items():
            r.to_csv(os.path.join(out, f"equations_{t}.csv"))
            a, b, c, _ = r.best_pair
            s, sc, _ = r.best_single
            summary["equations"][t] = {"best_pair": f"{a}+{b}", "pair_cosine": c, "best_single": s, "single_cosine": sc}
            lines.append(f"{t}: best pair {a}+{b} {c:.3f}; best single {s} {sc:.3f}")
    _emit(args, summary, lines)


def _common(p, corpus=True):
    p.add_argument("--config", help="JSON run configuration; flags override it")
    p.add_argument("--json", action="store_true", help="machine-readable summary on stdout")
    if corpus:
        p.add_argument("--corpus", "--in", dest="corpus", help="JSON Lines corpus")
        p.add_argument("--out", help="output directory")


def _sampling(p):
    p.add_argument("--set", help="built-in set name or comma-separated labels")
    p.add_argument("--limit", type=int, help="documents per label")
    p.add_argument("--modulus", type=int)
    p.add_argument("--residue", type=int)
    p.add_argument("--timezone")
    p.add_argument("--seed", type=int)
    p.add_argument("--shuffle-labels", action="store_true", help="null model: permute labels (seeded)")


def build_parser():
    parser = _Parser(prog="emospace", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="read and filter a raw JSON Lines harvest")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--rules", help="filter rules JSON (default: bundled keyword table)")
    p.add_argument("--out", required=True, help="filtered corpus JSON Lines")
    p.add_argument("--rejections", help="rejection report CSV (default: next to --out)")
    p.add_argument("--schema", action="append", metavar="FIELD=KEY")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("sample", help="modulus or time-zone subsample")
    _common(p, corpus=False)
    p.add_argument("--corpus", "--in", dest="corpus")
    p.add_argument("--out", dest="output", required=True, help="subsample JSON Lines")
    _sampling(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("esr", help="stream rate per label")
    _common(p)
    p.add_argument("--label")
    p.add_argument("--bucket", type=float, default=60.0, help="bucket width in seconds")
    p.set_defaults(func=cmd_esr)

    p = sub.add_parser("delsar", help="nearest-neighbour clustering accuracy and reduction")
    _common(p)
    _sampling(p)
    p.add_argument("--k", type=int)
    p.add_argument("--sweep", help="dimension range start:stop:step")
    p.add_argument("--reduce-to", type=int)
    p.set_defaults(func=cmd_delsar)

    p = sub.add_parser("elsa", help="per-label cohesion")
    _common(p)
    _sampling(p)
    p.add_argument("--dims", help="start:stop:step, comma list or single k")
    p.add_argument("--k", type=int, help=argparse.SUPPRESS)
    p.add_argument("--optimal", type=int, nargs="?", const=8, help="print the N most cohesive labels (bare flag: 8)")
    p.set_defaults(func=cmd_elsa)

    p = sub.add_parser("affect", help="similarity, MDS, profiles and equations from a clustering matrix")
    p.add_argument("--matrix", help="clustering_matrix.csv (default: bundled 21-emotion matrix)")
    p.add_argument("--out")
    p.add_argument("--all", action="store_true")
    p.add_argument("--similarity", action="store_true")
    p.add_argument("--mds", type=int, action="append", choices=[2, 3])
    p.add_argument("--profiles", nargs="?", const="all", help="comma-separated labels or 'all'")
    p.add_argument("--normalized", action="store_true", help="profile radials as shares")
    p.add_argument("--vmap", help="valence/circumplex JSON")
    p.add_argument("--equations", action="store_true")
    p.add_argument("--primaries", help="file or comma list (default: bundled list)")
    p.add_argument("--targets", help="comma list (default: depressed,disgusted,guilty)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_affect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"emospace {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EmospaceError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"emospace {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - last resort
        logger.exception("internal error")
        print(f"emospace {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
