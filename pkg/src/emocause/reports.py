"""TSV/JSON report writers. Every write goes through a temp file and a rename."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path


def atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x):
    return repr(float(x))


def keyphrase_records(causes, lexicon, vocab):
    records = []
    for tc in causes:
        for rank, kp in enumerate(tc.keyphrases, 1):
            records.append(dict(emotion=lexicon.names[tc.topic_id], rank=rank,
                                phrase=" ".join(vocab.tokens[w] for w in kp.tokens),
                                score=float(kp.score), frequency=int(kp.frequency)))
    return records


def write_keyphrase_report(path, records, as_json=False):
    lines = ["# emotion\trank\tphrase\tscore\tfrequency"]
    lines += [f"{r['emotion']}\t{r['rank']}\t{r['phrase']}\t{_fmt(r['score'])}\t{r['frequency']}"
              for r in records]
    atomic_write(path, "\n".join(lines) + "\n")
    if as_json:
        atomic_write(Path(path).with_suffix(".json"), json.dumps(records, ensure_ascii=False, indent=1))


def read_keyphrase_report(path):
    """emotion -> ranked phrase strings."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            emotion, rank, phrase = line.rstrip("\n").split("\t")[:3]
            out.setdefault(emotion, []).append((int(rank), phrase))
    return {e: [p for _, p in sorted(v)] for e, v in out.items()}


def emoticon_records(related, lexicon, vocab):
    records = []
    for k, items in related.items():
        for rank, (n, value) in enumerate(items, 1):
            records.append(dict(emotion=lexicon.names[k], rank=rank, emoticon=vocab.tokens[n],
                                relevance=float(value)))
    return records


def write_emoticon_report(path, records, threshold, p, as_json=False):
    lines = [f"# threshold={_fmt(threshold)}\tp={_fmt(p)}",
             "# emotion\trank\temoticon\trelevance"]
    lines += [f"{r['emotion']}\t{r['rank']}\t{r['emoticon']}\t{_fmt(r['relevance'])}" for r in records]
    atomic_write(path, "\n".join(lines) + "\n")
    if as_json:
        payload = dict(threshold=float(threshold), p=float(p), emoticons=records)
        atomic_write(Path(path).with_suffix(".json"), json.dumps(payload, ensure_ascii=False, indent=1))


def write_metric_report(path, results, ks=(5, 10), as_json=False):
    """``results``: method -> (rows, map) as returned by ``evaluate_rankings``."""
    head = "# method\temotion\t" + "\t".join(f"ndcg@{k}" for k in ks) + "\tap"
    lines = [head]
    payload = []
    for method, (rows, map_score) in results.items():
        for emotion, ndcgs, ap in rows:
            lines.append(f"{method}\t{emotion}\t" + "\t".join(f"{ndcgs[k]:.6f}" for k in ks) + f"\t{ap:.6f}")
            payload.append(dict(method=method, emotion=emotion,
                                **{f"ndcg@{k}": ndcgs[k] for k in ks}, ap=ap))
        lines.append(f"{method}\tMAP\t" + "\t".join("" for _ in ks) + f"\t{map_score:.6f}")
        payload.append(dict(method=method, emotion="MAP", map=map_score))
    atomic_write(path, "\n".join(lines) + "\n")
    if as_json:
        atomic_write(Path(path).with_suffix(".json"), json.dumps(payload, ensure_ascii=False, indent=1))
