"""Command-line entry point orchestrating the pipeline end to end.

Every subcommand reads its inputs, writes its delimited outputs atomically
into --out-dir, renders a figure alongside them, and echoes the effective
run configuration (defaults < config file < flags) for provenance. Exit
codes: 1 usage, 2 I/O, 3 validation, 4 scorer unreachable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import corpus, discriminator, metrics, objectives, penalties, plots, technicality
from .errors import PlainscoreError, ScorerUnavailable
from .files import read_jsonl, write_csv, write_json, write_jsonl
from .scorers import HttpScorer, UniformScorer, UnigramScorer
from .textstats import TokenVocab, bow_vector, build_word_vocab, stats_report

SCORER_URL_ENV = "PLAINSCORE_SCORER_URL"

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_SCORER = 4


@dataclass
class RunConfig:
    seed: int = 0
    cap: int = 1024
    ratio_low: float = 0.2
    ratio_high: float = 1.3
    rounds: int = 10
    mask_frac: float = 0.15
    temperature: float = 2.0
    alpha: float = 100.0
    top_p: float = 0.9
    scorer_url: str = ""
    out_dir: str = "out"

    def validate(self) -> None:
        if self.cap <= 0 or self.rounds <= 0:
            raise ValueError("cap and rounds must be positive")
        if not 0 < self.mask_frac < 1:
            raise ValueError(f"mask_frac must be in (0, 1), got {self.mask_frac}")
        if self.ratio_low <= 0 or self.ratio_low >= self.ratio_high:
            raise ValueError(
                f"need 0 < ratio_low < ratio_high, got {self.ratio_low}/{self.ratio_high}"
            )
        if self.temperature <= 0 or self.alpha < 0 or not 0 < self.top_p <= 1:
            raise ValueError("bad temperature/alpha/top_p")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        values.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for name in known:
        flag_value = getattr(args, name, None)
        if flag_value is not None:
            values[name] = flag_value
    if not values.get("scorer_url"):
        values["scorer_url"] = os.environ.get(SCORER_URL_ENV, "")
    config = RunConfig(**values)
    config.validate()
    return config


def _out_dir(config: RunConfig, command: str, inputs: dict) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(
        out / "run_config.json",
        {"command": command, "inputs": inputs, "config": asdict(config)},
    )
    return out


def _histogram_csv(values_by_role: dict, path, bins: int = 20):
    pooled = [v for values in values_by_role.values() for v in values]
    edges = np.histogram_bin_edges(pooled, bins=bins)
    roles = sorted(values_by_role)
    counts = {
        role: np.histogram(values_by_role[role], bins=edges)[0]
        for role in roles
    }
    rows = []
    for i in range(len(edges) - 1):
        rows.append(
            [float(edges[i]), float(edges[i + 1])] + [int(counts[r][i]) for r in roles]
        )
    write_csv(path, ["bin_left", "bin_right"] + roles, rows)


def _load_pairs(path) -> list[corpus.DocumentPair]:
    return [corpus.record_to_pair(rec) for rec in read_jsonl(path)]


def cmd_build_corpus(args) -> int:
    config = _config_from_args(args)
    out = _out_dir(config, "build-corpus", {"reviews": args.reviews, "vocab": args.vocab})
    vocab = TokenVocab.from_file(args.vocab) if args.vocab else None
    reviews = corpus.iter_reviews(read_jsonl(args.reviews))
    pairs, rejects = corpus.process_reviews(
        reviews,
        vocab=vocab,
        cap=config.cap,
        ratio_low=config.ratio_low,
        ratio_high=config.ratio_high,
    )
    write_jsonl(out / "pairs.jsonl", (corpus.pair_to_record(p) for p in pairs))
    write_jsonl(out / "rejects.jsonl", (corpus.rejection_to_record(r) for r in rejects))
    print(f"accepted {len(pairs)} pairs, rejected {len(rejects)}")
    return 0


def cmd_readability(args) -> int:
    config = _config_from_args(args)
    out = _out_dir(config, "readability", {"pairs": args.pairs})
    pairs = _load_pairs(args.pairs)
    records = []
    for pair in pairs:
        for role, text in (("abstract", pair.abstract_text), ("pls", pair.pls_text)):
            records.append({"id": pair.id, "role": role, **stats_report(text)})
    write_jsonl(out / "readability.jsonl", records)
    summary = {"config": asdict(config)}
    for metric in ("fk", "ari"):
        by_role = {}
        for role in ("abstract", "pls"):
            values = [r[metric] for r in records if r["role"] == role]
            by_role[role] = {
                "mean": float(np.mean(values)),
                "std": float(np.std(values)),
                "n": len(values),
            }
        summary[metric] = by_role
        values_by_role = {
            role: [r[metric] for r in records if r["role"] == role]
            for role in ("abstract", "pls")
        }
        _histogram_csv(values_by_role, out / f"readability_{metric}_hist.csv")
        plots.histogram_figure(
            values_by_role,
            out / f"readability_{metric}_hist.png",
            xlabel=metric.upper(),
            title=f"{metric.upper()} grade by document role",
        )
    write_json(out / "readability_summary.json", summary)
    print(
        "fk abstract/pls = {:.2f}/{:.2f}, ari = {:.2f}/{:.2f}".format(
            summary["fk"]["abstract"]["mean"],
            summary["fk"]["pls"]["mean"],
            summary["ari"]["abstract"]["mean"],
            summary["ari"]["pls"]["mean"],
        )
    )
    return 0


def _make_scorer(config: RunConfig, stub: str | None, pairs) -> object:
    if stub == "uniform":
        return UniformScorer()
    if stub == "unigram":
        return UnigramScorer([p.abstract_text for p in pairs])
    if not config.scorer_url:
        raise ScorerUnavailable(
            f"no scorer: pass --scorer-url, set {SCORER_URL_ENV}, or use --stub"
        )
    return HttpScorer(config.scorer_url)


def cmd_mlm_score(args) -> int:
    config = _config_from_args(args)
    out = _out_dir(config, "mlm-score", {"pairs": args.pairs, "generated": args.generated})
    pairs = _load_pairs(args.pairs)
    scorer = _make_scorer(config, args.stub, pairs)
    scored = technicality.score_corpus(
        pairs,
        scorer,
        seed=config.seed,
        rounds=config.rounds,
        mask_frac=config.mask_frac,
        max_workers=args.workers,
    )
    if args.generated:
        docs = [
            (str(rec["id"]), "generated", rec["text"])
            for rec in read_jsonl(args.generated)
        ]
        scored.extend(
            technicality.score_documents(
                docs,
                scorer,
                seed=config.seed,
                rounds=config.rounds,
                mask_frac=config.mask_frac,
                max_workers=args.workers,
            )
        )
    write_jsonl(out / "scores.jsonl", (doc.to_record() for doc in scored))
    values_by_role: dict[str, list[float]] = {}
    for doc in scored:
        values_by_role.setdefault(doc.role, []).append(doc.score.mean_prob)
    _histogram_csv(values_by_role, out / "scores_hist.csv")
    plots.histogram_figure(
        values_by_role,
        out / "scores_hist.png",
        xlabel="Masked-token probability",
        title="Document probability score",
    )
    summary = {
        "config": asdict(config),
        "means": {
            role: float(np.mean(vals)) for role, vals in sorted(values_by_role.items())
        },
    }
    write_json(out / "scores_summary.json", summary)
    print(" ".join(f"{role}={m:.4f}" for role, m in summary["means"].items()))
    return 0


def cmd_train_discriminator(args) -> int:
    config = _config_from_args(args)
    out = _out_dir(config, "train-discriminator", {"pairs": args.pairs, "vocab": args.vocab})
    pairs = _load_pairs(args.pairs)
    if args.vocab:
        vocab = TokenVocab.from_file(args.vocab)
    else:
        texts = [p.abstract_text for p in pairs] + [p.pls_text for p in pairs]
        vocab = build_word_vocab(texts)
        vocab.save(out / "vocab.txt")
    examples = []
    for pair in pairs:
        examples.append((bow_vector(pair.abstract_text, vocab), 0))
        examples.append((bow_vector(pair.pls_text, vocab), 1))
    model = discriminator.train(
        examples,
        len(vocab),
        lam=args.lam,
        seed=config.seed,
        max_iter=args.max_iter,
        vocab_ref=vocab.name,
    )
    model.training_meta["source"] = "cochrane"
    discriminator.save_model(model, out / "model.json")
    report: dict = {
        "config": asdict(config),
        "training": model.training_meta,
        "train_accuracy": discriminator.accuracy(model, examples),
    }
    if args.folds > 1:
        accs = discriminator.cross_validate(
            examples,
            len(vocab),
            folds=args.folds,
            lam=args.lam,
            seed=config.seed,
            max_iter=args.max_iter,
            vocab_ref=vocab.name,
        )
        report["cv_accuracies"] = accs
        report["cv_mean_accuracy"] = float(np.mean(accs))
    train_pairs, valid_pairs, _ = corpus.split_dataset(pairs, seed=config.seed)

    def split_examples(ps):
        return [
            (bow_vector(t, vocab), label)
            for p in ps
            for t, label in ((p.abstract_text, 0), (p.pls_text, 1))
        ]

    split_model = discriminator.train(
        split_examples(train_pairs),
        len(vocab),
        lam=args.lam,
        seed=config.seed,
        max_iter=args.max_iter,
        vocab_ref=vocab.name,
    )
    valid_scores = [
        (discriminator.predict_proba(split_model, vec), label)
        for vec, label in split_examples(valid_pairs)
    ]
    report["valid_auc"] = discriminator.roc_auc(valid_scores).auc
    negatives, positives = discriminator.top_tokens(model, args.top_k, vocab)
    report["top_negative"] = [[t, w] for t, w in negatives]
    report["top_positive"] = [[t, w] for t, w in positives]
    write_json(out / "discriminator_report.json", report)
    write_csv(
        out / "top_tokens.csv",
        ["rank", "negative_token", "negative_weight", "positive_token", "positive_weight"],
        [
            [i + 1, negatives[i][0], negatives[i][1], positives[i][0], positives[i][1]]
            for i in range(len(negatives))
        ],
    )
    plots.weight_bar_figure(
        negatives + positives[::-1],
        out / "top_tokens.png",
        title="Most technical vs. most plain tokens",
    )
    print(
        f"train acc {report['train_accuracy']:.3f}, valid AUC {report['valid_auc']:.3f}"
        + (f", CV acc {report['cv_mean_accuracy']:.3f}" if args.folds > 1 else "")
    )
    return 0


def cmd_roc(args) -> int:
    config = _config_from_args(args)
    out = _out_dir(config, "roc", {"scores": args.scores, "field": args.field})
    scores = []
    for rec in read_jsonl(args.scores):
        role = rec.get("role")
        if role == "abstract":
            label = 0
        elif role == "pls":
            label = 1
        else:
            continue  # generated text has no reference label
        scores.append((float(rec[args.field]), label))
    curve = discriminator.roc_auc(scores, higher_means_positive=args.higher_means_positive)
    write_csv(out / "roc.csv", ["fpr", "tpr"], [[x, y] for x, y in curve.points])
    write_json(
        out / "roc.json",
        {
            "auc": curve.auc,
            "field": args.field,
            "higher_means_positive": args.higher_means_positive,
            "n_scores": len(scores),
            "config": asdict(config),
        },
    )
    plots.roc_figure(curve.points, curve.auc, out / "roc.png", title=f"ROC ({args.field})")
    print(f"auc={curve.auc:.4f} over {len(scores)} scores")
    return 0


def cmd_ul_weights(args) -> int:
    config = _config_from_args(args)
    out = _out_dir(config, "ul-weights", {"model": args.model, "combine": args.combine})
    model = discriminator.load_model(args.model)
    source = args.source
    if args.combine:
        model = penalties.combine_models(model, discriminator.load_model(args.combine))
        source = source or "both"
    penalty_set = penalties.build_penalty_set(
        model, temperature=config.temperature, source=source
    )
    penalties.save_penalty_set(penalty_set, out / "penalties.json")
    top = sorted(penalty_set.entries.items(), key=lambda kv: (-kv[1], kv[0]))[:20]
    write_csv(out / "top_penalties.csv", ["token_id", "weight"], [[i, w] for i, w in top])
    plots.weight_bar_figure(
        [(str(i), w) for i, w in top],
        out / "top_penalties.png",
        title=f"Top penalty weights (T={config.temperature:g})",
        xlabel="Normalized penalty weight",
    )
    print(f"penalty set: {len(penalty_set)} tokens at T={penalty_set.temperature:g}")
    return 0


def cmd_ul_check(args) -> int:
    config = _config_from_args(args)
    out = _out_dir(config, "ul-check", {"dists": args.dists, "penalties": args.penalties})
    dists = objectives.load_step_distributions(args.dists)
    penalty_set = penalties.load_penalty_set(args.penalties)
    # losses are sums over steps; --per-token divides by step count and the
    # report records which convention produced the numbers
    scale = 1.0 / dists.n_steps if args.per_token else 1.0
    result = {
        "normalization": "per_token" if args.per_token else "sum",
        "n_steps": dists.n_steps,
        "ul": scale * objectives.ul_loss(dists, penalty_set),
        "ul_ungated": scale * objectives.ul_loss_ungated(dists, penalty_set),
    }
    if dists.targets is not None:
        combined = objectives.combined_loss(dists, penalty_set, config.alpha)
        result["nll"] = scale * combined.nll
        result["alpha"] = config.alpha
        result["total"] = scale * combined.total
    for key in ("ul", "ul_ungated", "nll", "total"):
        if key in result:
            print(f"{key}={result[key]:.6f}")
    write_json(out / "ul_check.json", {**result, "config": asdict(config)})
    return 0


def cmd_evaluate(args) -> int:
    config = _config_from_args(args)
    out = _out_dir(config, "evaluate", {"eval": args.eval})
    records = []
    for rec in read_jsonl(args.eval):
        records.append(
            metrics.EvalRecord(
                doc_id=str(rec.get("id", rec.get("doc_id", ""))),
                source=rec["source"],
                reference=rec["reference"],
                candidate=rec["candidate"],
            )
        )
    report = metrics.evaluate_corpus(records)
    report["config"] = asdict(config)
    write_json(out / "report.json", report)
    means = report["corpus_means"]
    write_csv(
        out / "metric_means.csv",
        ["metric", "value"],
        [[k, means[k]] for k in ("rouge1", "rouge2", "rougeL", "bleu", "sari")],
    )
    plots.overlap_figure(
        {
            "candidate": means["overlap_candidate"],
            "reference": means["overlap_reference"],
        },
        out / "overlap.png",
    )
    print(
        "R1={rouge1:.3f} R2={rouge2:.3f} RL={rougeL:.3f} BLEU={bleu:.3f} SARI={sari:.3f}".format(
            **{k: means[k] for k in ("rouge1", "rouge2", "rougeL", "bleu", "sari")}
        )
    )
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="plainscore", description=__doc__)
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON config file; flags override it")
    shared.add_argument("--seed", type=int)
    shared.add_argument("--out-dir", dest="out_dir")
    shared.add_argument("--scorer-url", dest="scorer_url")
    shared.add_argument("--temperature", type=float)
    shared.add_argument("--alpha", type=float)
    shared.add_argument("--top-p", dest="top_p", type=float)
    shared.add_argument("--cap", type=int)
    shared.add_argument("--ratio-low", dest="ratio_low", type=float)
    shared.add_argument("--ratio-high", dest="ratio_high", type=float)
    shared.add_argument("--rounds", type=int)
    shared.add_argument("--mask-frac", dest="mask_frac", type=float)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-corpus", parents=[shared], help="extract and filter text pairs")
    p.add_argument("--reviews", required=True)
    p.add_argument("--vocab", help="subword vocab file for token counting")
    p.set_defaults(func=cmd_build_corpus)

    p = sub.add_parser("readability", parents=[shared], help="grade-level report per document")
    p.add_argument("--pairs", required=True)
    p.set_defaults(func=cmd_readability)

    p = sub.add_parser("mlm-score", parents=[shared], help="masked-LM technicality scores")
    p.add_argument("--pairs", required=True)
    p.add_argument("--generated", help="jsonl of {id, text} records to score as generated")
    p.add_argument("--stub", choices=["uniform", "unigram"], help="offline stub scorer")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_mlm_score)

    p = sub.add_parser("train-discriminator", parents=[shared], help="fit the jargon classifier")
    p.add_argument("--pairs", required=True)
    p.add_argument("--vocab")
    p.add_argument("--lambda", dest="lam", type=float, default=1e-4)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=500)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--top-k", dest="top_k", type=int, default=15)
    p.set_defaults(func=cmd_train_discriminator)

    p = sub.add_parser("roc", parents=[shared], help="ROC curve over any per-document score file")
    p.add_argument("--scores", required=True)
    p.add_argument("--field", default="mean_prob", help="record field holding the score")
    p.add_argument(
        "--higher-means-positive",
        action="store_true",
        help="set when larger scores indicate plain language",
    )
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("ul-weights", parents=[shared], help="build a penalty set from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--combine", help="second model whose weights are summed in")
    p.add_argument("--source", help="penalty set source tag")
    p.set_defaults(func=cmd_ul_weights)

    p = sub.add_parser("ul-check", parents=[shared], help="evaluate losses on a matrix file")
    p.add_argument("--dists", required=True)
    p.add_argument("--penalties", required=True)
    p.add_argument(
        "--per-token",
        dest="per_token",
        action="store_true",
        help="report losses divided by the number of steps instead of sums",
    )
    p.set_defaults(func=cmd_ul_check)

    p = sub.add_parser("evaluate", parents=[shared], help="simplification metric battery")
    p.add_argument("--eval", required=True)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScorerUnavailable as exc:
        print(f"error: scorer unreachable: {exc}", file=sys.stderr)
        return EXIT_SCORER
    except (FileNotFoundError, PermissionError, IsADirectoryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PlainscoreError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
