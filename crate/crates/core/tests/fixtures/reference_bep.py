#!/usr/bin/env python3
"""Recomputes per-category, macro and micro break-even points for a models
directory and a labeled corpus, independently of the Rust implementation.

usage: reference_bep.py MODELS_DIR CORPUS > golden.txt
"""
import math
import os
import re
import sys


def unescape(text):
    out, i = [], 0
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            mapped = {"t": "\t", "n": "\n", "r": "\r", "\\": "\\"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
        out.append(c)
        i += 1
    return "".join(out)


def read_corpus(path):
    docs = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            doc_id, labels, text = line.split("\t", 2)
            docs.append((set(l for l in labels.split(",") if l), unescape(text)))
    return docs


def tokenize(text):
    return [t.lower() for t in re.findall(r"[^\W\d_]+", text) if len(t) >= 2]


def read_vocab(path):
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    vocab = {}
    for line in lines[1:]:
        tok, idx, _count = line.split("\t")
        vocab[tok] = int(idx)
    return vocab


def read_model(path):
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    header = lines[0]
    category = header.split(" category=", 1)[1]
    fields = dict(kv.split("=", 1) for kv in header.split(" category=", 1)[0].split()[2:])
    weights = {}
    filtered = set()
    for line in lines[1:]:
        if line.startswith("filtered:"):
            rest = line[len("filtered:"):].strip()
            filtered = {int(x) for x in rest.split(",") if x}
            continue
        parts = line.split("\t")
        if len(parts) == 3:
            weights[int(parts[0])] = float(parts[1]) - float(parts[2])
        else:
            weights[int(parts[0])] = float(parts[1])
    init = float(fields["init"]) - float(fields.get("init_neg", "0"))
    return {
        "category": category,
        "theta": float(fields["theta"]),
        "strength": fields["strength"],
        "normalize": fields["normalize"] == "true",
        "weights": weights,
        "init": init,
        "filtered": filtered,
    }


def vectorize(vocab, text, strength, normalize):
    counts = {}
    for tok in tokenize(text):
        if tok in vocab:
            counts[vocab[tok]] = counts.get(vocab[tok], 0) + 1
    if strength == "binary":
        vec = {i: 1.0 for i in counts}
    elif strength == "linear":
        vec = {i: float(n) for i, n in counts.items()}
    else:
        vec = {i: math.sqrt(n) for i, n in counts.items()}
    if normalize and vec:
        total = sum(vec.values())
        vec = {i: s / total for i, s in vec.items()}
    return vec


def score(model, vec):
    total = 0.0
    for i, s in vec.items():
        if i in model["filtered"]:
            continue
        total += s * model["weights"].get(i, model["init"])
    return total


def sweep(pairs):
    """(recall, precision) accepting nothing, then each distinct score level."""
    pos = sum(1 for _, l in pairs if l)
    points = [(0.0, 1.0)]
    for level in sorted({s for s, _ in pairs}, reverse=True):
        accepted = [l for s, l in pairs if s >= level]
        tp = sum(1 for l in accepted if l)
        points.append((tp / pos, tp / len(accepted)))
    return points


def bep(points):
    for k, (r, p) in enumerate(points):
        if p == r:
            return p
        if k:
            r0, p0 = points[k - 1]
            if (p0 - r0 > 0) != (p - r > 0):
                t = (p0 - r0) / ((p0 - r0) - (p - r))
                return r0 + t * (r - r0)
    r, p = min(points, key=lambda rp: abs(rp[1] - rp[0]))
    return (r + p) / 2


def main():
    models_dir, corpus_path = sys.argv[1], sys.argv[2]
    vocab = read_vocab(os.path.join(models_dir, "vocab.txt"))
    models = [
        read_model(os.path.join(models_dir, name))
        for name in sorted(os.listdir(models_dir))
        if name.endswith(".model")
    ]
    models.sort(key=lambda m: m["category"])
    docs = read_corpus(corpus_path)
    rows, pooled = [], []
    for m in models:
        pairs = [
            (score(m, vectorize(vocab, text, m["strength"], m["normalize"])), m["category"] in labels)
            for labels, text in docs
        ]
        pooled.extend(pairs)
        if any(l for _, l in pairs):
            rows.append((m["category"], bep(sweep(pairs))))
        else:
            rows.append((m["category"], None))
    scored = [b for _, b in rows if b is not None]
    for cat, b in rows:
        print(f"{cat}\t{'NA' if b is None else repr(b)}")
    print(f"macro\t{repr(sum(scored) / len(scored))}")
    print(f"micro\t{repr(bep(sweep(pooled)))}")


if __name__ == "__main__":
    main()
