"""Command-line entry point: ``emocause <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import KEYS, PipelineConfig, make_config
from .corpus import Corpus, Tweet, build_corpus, load_lexicon, read_corpus
from .ctpr import detect_causes
from .evaluation import evaluate_rankings, load_annotations
from .exceptions import EmoCauseError, PipelineError
from .pipeline import cause_kwargs, emoticon_stage, run_pipeline, train_kwargs
from .reports import (atomic_write, emoticon_records, keyphrase_records, read_keyphrase_report,
                      write_emoticon_report, write_keyphrase_report, write_metric_report)
from .synth import write_synth
from .tsbtm import load_model, save_model, train

log = logging.getLogger("emocause")


def _add_config_flags(parser, required=()):
    parser.add_argument("--config", required="config" in required, help="key = value config file")
    for key in KEYS:
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        kwargs = dict(dest=key, default=None, metavar=key.upper())
        if key in ("soft_assign", "json"):
            kwargs.update(nargs="?", const="true")
        parser.add_argument(*flags, required=key in required, **kwargs)


def _config(args) -> PipelineConfig:
    overrides = {k: getattr(args, k) for k in KEYS}
    return make_config(args.config, **overrides)


def _out_dir(cfg) -> Path:
    out = Path(cfg.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_inputs(cfg, need_lexicon=True):
    if cfg.corpus is None:
        raise EmoCauseError("--corpus is required")
    if need_lexicon and cfg.lexicon is None:
        raise EmoCauseError("--lexicon is required")
    lexicon = load_lexicon(cfg.lexicon)
    return build_corpus(read_corpus(cfg.corpus), lexicon) + (lexicon,)


def _corpus_for_model(model, path):
    """Index a corpus file with a saved model's vocabulary; unseen tokens are dropped."""
    tweets = []
    for lineno, toks in enumerate(read_corpus(path)):
        ids = tuple(i for i in (model.vocab.id_of(t) for t in toks) if i is not None)
        if any(model.vocab.emotion_of[i] is not None for i in ids):
            tweets.append(Tweet(ids, lineno))
    return Corpus(tweets, model.vocab)


def cmd_preprocess(args):
    lines = read_corpus(args.input)
    atomic_write(args.output, "".join(" ".join(t) + "\n" for t in lines))
    if args.vocab_dump:
        if not args.lexicon:
            raise EmoCauseError("--vocab-dump needs --lexicon")
        _, vocab = build_corpus(lines, load_lexicon(args.lexicon))
        vocab.dump(args.vocab_dump)
    return 0


def cmd_train(args):
    cfg = _config(args)
    corpus, vocab, lexicon = _load_inputs(cfg)
    model = train(corpus, vocab, lexicon, **train_kwargs(cfg))
    path = Path(args.model) if args.model else _out_dir(cfg) / "model.tsv"
    tmp = path.with_name(f".{path.name}.tmp")
    save_model(model, tmp)
    tmp.replace(path)
    print(f"wrote {path} (K={model.n_topics}, V={len(vocab)}, biterms={model.config['n_biterms']})")
    return 0


def cmd_causes(args):
    cfg = _config(args)
    model = load_model(args.model)
    corpus = _corpus_for_model(model, cfg.corpus)
    causes = detect_causes(model, corpus, **cause_kwargs(cfg))
    path = _out_dir(cfg) / "keyphrases.tsv"
    write_keyphrase_report(path, keyphrase_records(causes, model.lexicon, model.vocab), cfg.json)
    print(f"wrote {path}")
    return 0


def cmd_emoticons(args):
    cfg = _config(args)
    model = load_model(args.model)
    causes = None
    if cfg.relevance_source == "pagerank":
        causes = detect_causes(model, _corpus_for_model(model, cfg.corpus), **cause_kwargs(cfg))
    _, threshold, related = emoticon_stage(model, causes, cfg.p, cfg.relevance_source)
    path = _out_dir(cfg) / "emoticons.tsv"
    write_emoticon_report(path, emoticon_records(related, model.lexicon, model.vocab),
                          threshold, cfg.p, cfg.json)
    print(f"wrote {path} (threshold={threshold:.6g})")
    return 0


def cmd_eval(args):
    annotations = load_annotations(args.annotations)
    ks = tuple(int(k) for k in args.ks.split(","))
    results = {}
    for spec in args.causes:
        name, _, path = spec.rpartition("=")
        name = name or Path(path).stem
        results[name] = evaluate_rankings(read_keyphrase_report(path), annotations, ks, args.gain)
    write_metric_report(args.output, results, ks, args.json)
    for name, (_, map_score) in results.items():
        print(f"{name}\tMAP={map_score:.4f}")
    return 0


def cmd_synth(args):
    corpus, lexicon, _ = write_synth(args.out_dir, K=args.K, V=args.V, n_tweets=args.n_tweets,
                                     tweet_len=args.tweet_len, seeds_per_topic=args.seeds_per_topic,
                                     emoticons_per_topic=args.emoticons_per_topic,
                                     seed=args.seed, noise=args.noise)
    print(f"wrote {corpus} and {lexicon}")
    return 0


def cmd_run(args):
    cfg = _config(args)
    bundle = run_pipeline(cfg)
    counts = bundle["manifest"]["counts"]
    print(f"wrote reports to {cfg.out_dir} (tweets={counts['tweets']}, V={counts['vocabulary']}, "
          f"K={counts['emotions']}, emoticons={counts['emoticons']})")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="emocause", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="clean a raw corpus file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--lexicon")
    p.add_argument("--vocab-dump", dest="vocab_dump")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="fit the supervised biterm topic model")
    _add_config_flags(p)
    p.add_argument("--model", help="output path (default OUT_DIR/model.tsv)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("causes", help="rank terms and emit keyphrases per emotion")
    _add_config_flags(p)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_causes)

    p = sub.add_parser("emoticons", help="threshold emoticon relevance per emotion")
    _add_config_flags(p)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_emoticons)

    p = sub.add_parser("eval", help="NDCG@k / MAP of cause reports against annotations")
    p.add_argument("--annotations", required=True)
    p.add_argument("--causes", action="append", required=True, metavar="[NAME=]PATH")
    p.add_argument("--output", required=True)
    p.add_argument("--ks", default="5,10")
    p.add_argument("--gain", default="linear", choices=("linear", "exponential"))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="write a synthetic corpus with ground truth")
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--V", type=int, default=60)
    p.add_argument("--n_tweets", "--n-tweets", type=int, default=2000)
    p.add_argument("--tweet_len", "--tweet-len", type=int, default=8)
    p.add_argument("--seeds_per_topic", "--seeds-per-topic", type=int, default=2)
    p.add_argument("--emoticons_per_topic", "--emoticons-per-topic", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", action="store_true")
    p.add_argument("--out_dir", "--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="full pipeline")
    _add_config_flags(p, required=("config", "seed", "out_dir"))
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (EmoCauseError, OSError) as exc:
        print(f"error: [{args.command}] {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
